// Truncated-series sampler for the stable-regenerative multiple-stable process:
// Rademacher signs, standard Poisson arrivals, stationary shifts and covering
// approximations of regenerative sets feed the multilinear series
//   p! C_alpha^{p/alpha} sum_{I, max I <= m} (prod_{i in I} sign_i arrival_i^{-1/alpha})
//        * L_t( intersection_{i in I} (R_i + V_i) ),
// evaluated with the occupation local time at covering resolution eps. Two
// approximation knobs (series cutoff m, covering resolution eps) are exposed
// and reported; the tail beyond m is bounded by a per-sample diagnostic.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "regenlab/covering.hpp"
#include "regenlab/interval_set.hpp"
#include "regenlab/levy.hpp"
#include "regenlab/local_time.hpp"
#include "regenlab/moments.hpp"
#include "regenlab/rng.hpp"

namespace regenlab {

struct SeriesTruncation {
    int active_max_index = 12;  // m: only index sets with max I <= m enter the sum
    int n_arrivals = 50;        // total Poisson arrivals simulated (>= m)

    void validate(int multiplicity) const {
        if (active_max_index < multiplicity)
            throw std::invalid_argument("SeriesTruncation: m < multiplicity");
        if (n_arrivals < active_max_index)
            throw std::invalid_argument("SeriesTruncation: n_arrivals < m");
    }
};

struct MultiStablePath {
    std::vector<double> grid;
    std::vector<double> values;
    double alpha = 0.0;
    double beta = 0.0;
    int multiplicity = 0;
    SeriesTruncation truncation;
    double epsilon_cover = 0.0;
};

// Shared randomness of one series sample; assembling paths from a fixed draw
// allows coupled comparisons across truncation levels.
struct SeriesDraw {
    std::vector<int> signs;                 // size n_arrivals
    std::vector<double> arrivals;           // size n_arrivals, cumulative Exp(1)
    std::vector<double> shifts;             // size m
    std::vector<CoveringSample> coverings;  // size m, horizon 1
};

inline SeriesDraw sample_series_draw(double beta, const SeriesTruncation& trunc,
                                     double epsilon_cover, RngStream& rng) {
    SeriesDraw d;
    d.signs.resize(static_cast<std::size_t>(trunc.n_arrivals));
    d.arrivals.resize(static_cast<std::size_t>(trunc.n_arrivals));
    double g = 0.0;
    for (int i = 0; i < trunc.n_arrivals; ++i) {
        d.signs[static_cast<std::size_t>(i)] = rademacher(rng);
        g += exponential(rng);
        d.arrivals[static_cast<std::size_t>(i)] = g;
    }
    CoveringConfig cfg{beta, epsilon_cover, 1.0};
    d.shifts.reserve(static_cast<std::size_t>(trunc.active_max_index));
    d.coverings.reserve(static_cast<std::size_t>(trunc.active_max_index));
    for (int i = 0; i < trunc.active_max_index; ++i) {
        d.shifts.push_back(sample_stationary_shift(beta, rng));
        d.coverings.push_back(sample_covering(cfg, rng));
    }
    return d;
}

namespace detail {

// iterate over strictly increasing p-tuples from {0, ..., m-1}
template <class Fn>
void for_each_index_set(int m, int p, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
    for (;;) {
        fn(std::span<const int>(idx));
        int j = p - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == m - p + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int k = j + 1; k < p; ++k)
            idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
}

}  // namespace detail

inline MultiStablePath assemble_multistable_path(const SeriesDraw& draw, double alpha,
                                                 double beta, int p, int active_max_index,
                                                 double epsilon_cover,
                                                 std::span<const double> grid) {
    if (active_max_index > static_cast<int>(draw.coverings.size()))
        throw std::invalid_argument("assemble_multistable_path: draw smaller than cutoff");
    LocalTimeParams params(beta, p);
    const double bp = params.index();
    const double lt_norm = std::pow(epsilon_cover / std::exp(1.0), bp - 1.0) / std::tgamma(bp);
    double p_fact = 1.0;
    for (int j = 2; j <= p; ++j) p_fact *= j;
    const double lead = p_fact * std::pow(stable_norm_constant(alpha),
                                          static_cast<double>(p) / alpha);

    MultiStablePath path;
    path.grid.assign(grid.begin(), grid.end());
    path.values.assign(grid.size(), 0.0);
    path.alpha = alpha;
    path.beta = beta;
    path.multiplicity = p;
    path.truncation = {active_max_index, static_cast<int>(draw.arrivals.size())};
    path.epsilon_cover = epsilon_cover;

    std::vector<IntervalSet> shifted;
    shifted.reserve(static_cast<std::size_t>(active_max_index));
    for (int i = 0; i < active_max_index; ++i)
        shifted.push_back(draw.coverings[static_cast<std::size_t>(i)].uncovered.shift(
            draw.shifts[static_cast<std::size_t>(i)]));

    detail::for_each_index_set(active_max_index, p, [&](std::span<const int> idx) {
        double w = lead;
        for (int i : idx) {
            w *= draw.signs[static_cast<std::size_t>(i)] *
                 std::pow(draw.arrivals[static_cast<std::size_t>(i)], -1.0 / alpha);
        }
        IntervalSet s = shifted[static_cast<std::size_t>(idx[0])];
        for (std::size_t j = 1; j < idx.size(); ++j)
            s = intersect(s, shifted[static_cast<std::size_t>(idx[j])]);
        auto meas = s.measures_upto(path.grid);
        for (std::size_t g = 0; g < meas.size(); ++g)
            path.values[g] += w * lt_norm * meas[g];
    });
    return path;
}

inline MultiStablePath sample_multistable_path(double alpha, double beta, int p,
                                               const SeriesTruncation& trunc,
                                               double epsilon_cover,
                                               std::span<const double> grid, RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("sample_multistable_path: alpha outside (0,2)");
    LocalTimeParams params(beta, p);  // validates beta_p
    trunc.validate(p);
    if (!(epsilon_cover > 0.0))
        throw std::invalid_argument("sample_multistable_path: epsilon_cover <= 0");
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (grid[g] < 0.0 || grid[g] > 1.0)
            throw std::invalid_argument("sample_multistable_path: grid outside [0,1]");
    SeriesDraw draw = sample_series_draw(beta, trunc, epsilon_cover, rng);
    return assemble_multistable_path(draw, alpha, beta, p, trunc.active_max_index,
                                     epsilon_cover, grid);
}

// Self-similarity index of the limit process.
inline double hurst_exponent(double alpha, double beta, int p) {
    LocalTimeParams params(beta, p);
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("hurst_exponent: alpha outside (0,2)");
    double bp = params.index();
    return bp + (1.0 - bp) / alpha;
}

// Per-sample proxy for the second moment of the neglected tail of the series:
//   (p! C_alpha^{p/alpha})^2 * E L^2 * sum_{m < max I <= n_arrivals} prod_i arrival_i^{-2/alpha},
// with the realized arrivals of a fresh draw. Decreases in m and vanishes at
// m = n_arrivals; used to pick the cutoff.
inline double truncation_tail_weight(double alpha, double beta, int p,
                                     const SeriesTruncation& trunc, RngStream& rng) {
    LocalTimeParams params(beta, p);
    trunc.validate(p);
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("truncation_tail_weight: alpha outside (0,2)");
    const int n = trunc.n_arrivals;
    std::vector<double> w(static_cast<std::size_t>(n));
    double g = 0.0;
    for (int i = 0; i < n; ++i) {
        g += exponential(rng);
        w[static_cast<std::size_t>(i)] = std::pow(g, -2.0 / alpha);
    }
    // elementary symmetric polynomial e_p over growing prefixes
    std::vector<double> e(static_cast<std::size_t>(p) + 1, 0.0);
    e[0] = 1.0;
    double e_p_at_m = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::min(p, i + 1); j >= 1; --j)
            e[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(i)] *
                                              e[static_cast<std::size_t>(j - 1)];
        if (i + 1 == trunc.active_max_index) e_p_at_m = e[static_cast<std::size_t>(p)];
    }
    double tail_sum = e[static_cast<std::size_t>(p)] - e_p_at_m;
    double p_fact = 1.0;
    for (int j = 2; j <= p; ++j) p_fact *= j;
    double lead = p_fact * std::pow(stable_norm_constant(alpha), static_cast<double>(p) / alpha);
    double second_moment = closed_increment_moment(beta, p, 2, 0.0, 1.0);
    return lead * lead * second_moment * tail_sum;
}

}  // namespace regenlab

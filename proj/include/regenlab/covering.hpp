// Construction of beta-stable regenerative sets at resolution epsilon via the
// Poisson random covering scheme: the uncovered set of a Poisson family of open
// intervals (y, y+z) with intensity (1-beta) dy z^{-2} dz, z >= epsilon, is an
// epsilon-approximation of a beta-stable regenerative set. Supports stationary
// shifts, intersections of shifted families, and nested refinement to a finer
// epsilon coupled with the original sample.
//
// A second, independent backend builds the range of a beta-stable subordinator
// from positive-stable increments (Kanter's representation); it is used only to
// cross-validate the covering scheme.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "regenlab/interval_set.hpp"
#include "regenlab/rng.hpp"

namespace regenlab {

struct CoveringConfig {
    double beta = 0.5;
    double epsilon = 1e-3;
    double horizon = 1.0;

    void validate() const {
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("CoveringConfig: beta outside (0,1)");
        if (!(epsilon > 0.0)) throw std::invalid_argument("CoveringConfig: epsilon <= 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("CoveringConfig: horizon <= 0");
    }
};

struct CoveringPoint {
    double y = 0.0;  // left endpoint of the covering interval (y, y+z)
    double z = 0.0;  // length, >= the epsilon active when the point was drawn
};

struct CoveringSample {
    CoveringConfig config;
    std::vector<CoveringPoint> points;
    IntervalSet uncovered{1.0};
};

namespace detail {

inline IntervalSet uncovered_from_points(std::span<const CoveringPoint> pts, double horizon) {
    std::vector<Interval> covered;
    covered.reserve(pts.size());
    for (const auto& p : pts) covered.push_back({p.y, p.y + p.z});
    return canonicalize(std::move(covered), horizon).complement();
}

}  // namespace detail

// Draw one covering sample. The marker coordinate of the underlying Poisson
// process is marginalized out and contributes the (1-beta) intensity factor;
// z is sampled by inverse CDF z = epsilon/U and truncated at 10*horizon
// (intervals longer than the window act identically within it).
inline CoveringSample sample_covering(const CoveringConfig& cfg, RngStream& rng) {
    cfg.validate();
    CoveringSample s;
    s.config = cfg;
    const double mean_count = (1.0 - cfg.beta) * cfg.horizon / cfg.epsilon;
    const double z_cap = 10.0 * cfg.horizon;
    const long long n = poisson(rng, mean_count);
    s.points.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        double y = uniform(rng, 0.0, cfg.horizon);
        double z = std::min(cfg.epsilon / uniform_open(rng), z_cap);
        s.points.push_back({y, z});
    }
    s.uncovered = detail::uncovered_from_points(s.points, cfg.horizon);
    return s;
}

// Add the independent Poisson layer with z in [epsilon_new, epsilon). The new
// uncovered set is computed as the intersection of the old one with the layer
// complement, so nesting holds exactly, interval by interval.
inline CoveringSample refine_covering(const CoveringSample& s, double epsilon_new,
                                      RngStream& rng) {
    const double eps_old = s.config.epsilon;
    if (!(epsilon_new > 0.0 && epsilon_new < eps_old))
        throw std::invalid_argument("refine_covering: need 0 < epsilon_new < current epsilon");
    CoveringSample out;
    out.config = s.config;
    out.config.epsilon = epsilon_new;
    const double horizon = s.config.horizon;
    const double mean_count =
        (1.0 - s.config.beta) * horizon * (1.0 / epsilon_new - 1.0 / eps_old);
    const long long n = poisson(rng, mean_count);
    std::vector<CoveringPoint> layer;
    layer.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        double y = uniform(rng, 0.0, horizon);
        // inverse CDF on the z-marginal restricted to [epsilon_new, eps_old)
        double z = 1.0 / (1.0 / eps_old +
                          uniform_open(rng) * (1.0 / epsilon_new - 1.0 / eps_old));
        layer.push_back({y, z});
    }
    out.uncovered = intersect(s.uncovered, detail::uncovered_from_points(layer, horizon));
    out.points = s.points;
    out.points.insert(out.points.end(), layer.begin(), layer.end());
    return out;
}

// Stationary shift restricted to [0,1]: P(V <= v) = v^{1-beta}.
inline double sample_stationary_shift(double beta, RngStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("sample_stationary_shift: beta outside (0,1)");
    return std::pow(uniform_open(rng), 1.0 / (1.0 - beta));
}

struct ShiftedCovering {
    CoveringSample sample;
    double shift = 0.0;
};

// Canonical intersection of the shifted uncovered sets, clipped to the window.
inline IntervalSet intersect_shifted(std::span<const ShiftedCovering> members) {
    if (members.empty()) throw std::invalid_argument("intersect_shifted: empty family");
    const double horizon = members.front().sample.config.horizon;
    for (const auto& m : members)
        if (m.sample.config.horizon != horizon)
            throw std::invalid_argument("intersect_shifted: mismatched horizons");
    IntervalSet acc = members.front().sample.uncovered.shift(members.front().shift);
    for (std::size_t i = 1; i < members.size(); ++i)
        acc = intersect(acc, members[i].sample.uncovered.shift(members[i].shift));
    return acc;
}

// One increment of the standard beta-stable subordinator over dt, i.e. a draw
// with Laplace transform exp(-dt lambda^beta), via Kanter's representation.
inline double stable_subordinator_increment(double beta, double dt, RngStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("stable_subordinator_increment: beta outside (0,1)");
    constexpr double pi = 3.14159265358979323846;
    double theta = pi * uniform_open(rng);
    double w = exponential(rng);
    double log_a_num = beta * std::log(std::sin(beta * theta)) +
                       (1.0 - beta) * std::log(std::sin((1.0 - beta) * theta)) -
                       std::log(std::sin(theta));
    double log_s = log_a_num / beta - std::log(w) * (1.0 - beta) / beta;
    return std::pow(dt, 1.0 / beta) * std::exp(log_s);
}

// Range of a beta-stable subordinator inside [0, horizon], discretized to
// n_steps nominal resolution; returned as a set of isolated points. For
// cross-validation of the covering backend only.
inline IntervalSet sample_subordinator_range(double beta, double horizon, long n_steps,
                                             RngStream& rng) {
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_subordinator_range: horizon <= 0");
    if (n_steps < 1) throw std::invalid_argument("sample_subordinator_range: n_steps < 1");
    const double dt = std::pow(horizon, beta) / static_cast<double>(n_steps);
    std::vector<Interval> pts;
    pts.reserve(static_cast<std::size_t>(n_steps) + 1);
    double sigma = 0.0;
    pts.push_back({0.0, 0.0});
    const long hard_cap = 64 * n_steps;
    for (long j = 0; j < hard_cap && sigma <= horizon; ++j) {
        sigma += stable_subordinator_increment(beta, dt, rng);
        if (sigma <= horizon) pts.push_back({sigma, sigma});
    }
    return canonicalize(std::move(pts), horizon);
}

}  // namespace regenlab

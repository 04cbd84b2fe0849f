// Local-time approximants for intersections of shifted stable regenerative
// sets: the epsilon-normalized occupation measure, the Kingman dilation
// estimator, and Mittag-Leffler reference paths obtained by inverting a stable
// subordinator.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "regenlab/covering.hpp"
#include "regenlab/interval_set.hpp"
#include "regenlab/rng.hpp"

namespace regenlab {

// Parameters of a p-fold intersection: the intersection of p independent
// beta-stable regenerative sets is stable of index p*beta - p + 1, which must
// lie in (0,1) for the intersection to be nondegenerate.
struct LocalTimeParams {
    double beta;
    int multiplicity;  // p

    LocalTimeParams(double beta_, int p_) : beta(beta_), multiplicity(p_) {
        if (p_ < 1) throw std::invalid_argument("LocalTimeParams: multiplicity < 1");
        if (!(beta_ > 0.0 && beta_ < 1.0))
            throw std::invalid_argument("LocalTimeParams: beta outside (0,1)");
        double bp = index();
        if (!(bp > 0.0 && bp < 1.0))
            throw std::invalid_argument(
                "LocalTimeParams: p*beta - p + 1 outside (0,1); need beta > 1 - 1/p");
    }

    double index() const { return multiplicity * beta - multiplicity + 1.0; }
};

struct LocalTimePath {
    std::vector<double> grid;
    std::vector<double> values;
};

// Occupation-measure local time of an intersection set sampled at covering
// resolution epsilon:
//   (1/Gamma(bp)) (epsilon/e)^{bp-1} * lambda(set ∩ [s,t]),  bp = p*beta-p+1.
// Exact given the interval set.
inline double local_time_eps(const IntervalSet& set, double s, double t, double epsilon,
                             const LocalTimeParams& params) {
    if (s > t) throw std::invalid_argument("local_time_eps: s > t");
    if (!(epsilon > 0.0)) throw std::invalid_argument("local_time_eps: epsilon <= 0");
    const double bp = params.index();
    const double norm = std::pow(epsilon / std::exp(1.0), bp - 1.0) / std::tgamma(bp);
    return norm * (set.measure_upto(t) - set.measure_upto(s));
}

// Finite-n Kingman estimator: Gamma(2-bp) n^{1-bp} * lambda((F∩[0,t]) + [-1/2n, 1/2n]).
inline double kingman_estimate(const IntervalSet& set, double t, long n,
                               const LocalTimeParams& params) {
    if (n < 1) throw std::invalid_argument("kingman_estimate: n < 1");
    const double bp = params.index();
    IntervalSet dilated = set.restrict_upto(t).dilate(1.0 / static_cast<double>(n));
    double upto = std::min(set.window_hi(), t + 0.5 / static_cast<double>(n));
    return std::tgamma(2.0 - bp) * std::pow(static_cast<double>(n), 1.0 - bp) *
           dilated.measure_upto(upto);
}

// Mittag-Leffler path: right-continuous inverse of a beta-stable subordinator
// (E exp(-lambda sigma_t) = exp(-t lambda^beta)), sampled on a linear time grid
// of n_steps points over [0, horizon]. The subordinator is simulated on an
// operational-time grid of step horizon^beta/n_steps, so the inversion error is
// bounded by one step.
inline LocalTimePath sample_mittag_leffler(double beta, double horizon, long n_steps,
                                           RngStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("sample_mittag_leffler: beta outside (0,1)");
    if (!(horizon > 0.0) || n_steps < 1)
        throw std::invalid_argument("sample_mittag_leffler: bad horizon or n_steps");
    const double dt = std::pow(horizon, beta) / static_cast<double>(n_steps);
    LocalTimePath path;
    path.grid.resize(static_cast<std::size_t>(n_steps) + 1);
    path.values.resize(path.grid.size());
    double sigma = 0.0;
    long count = 0;  // number of operational steps with sigma <= t
    for (long k = 0; k <= n_steps; ++k) {
        double t = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
        while (sigma <= t) {
            sigma += stable_subordinator_increment(beta, dt, rng);
            ++count;
        }
        path.grid[static_cast<std::size_t>(k)] = t;
        path.values[static_cast<std::size_t>(k)] = dt * static_cast<double>(count - 1);
    }
    return path;
}

}  // namespace regenlab

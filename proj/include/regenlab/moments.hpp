// Moment formulas for joint local times of intersections of shifted stable
// regenerative sets:
//
//  * closed_increment_moment: the closed-form r-th moment of an increment,
//      Gamma(beta)^p Gamma(2-beta)^p r! / (Gamma(bp) Gamma((r-1)bp+2))
//        * (t-s)^{(r-1)bp+1},        bp = p*beta - p + 1;
//  * joint_moment: the r-dimensional singular integral
//      Gamma(bp)^{-r} int_{0<x<t} prod_i h_{|owners(i)|}(x_{owners(i)}) dx
//    evaluated by stratified importance sampling (one stratum per coordinate
//    ordering, Beta-type proposals on consecutive gaps that cancel the
//    dominant power singularities, giving bounded weights);
//  * joint_moment_given_shifts: the same integral conditioned on deterministic
//    shifts, with anchored kernels and per-coordinate floors.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "regenlab/kernels.hpp"
#include "regenlab/rng.hpp"
#include "regenlab/stats.hpp"

namespace regenlab {

struct MomentSpec {
    double beta = 0.5;
    int multiplicity = 1;                      // p
    std::vector<std::vector<int>> index_sets;  // I_1..I_r, 1-based strictly increasing
    std::vector<double> times;                 // t_1..t_r in [0,1]

    int order() const { return static_cast<int>(index_sets.size()); }  // r

    int max_index() const {  // K
        int k = 0;
        for (const auto& is : index_sets)
            for (int i : is) k = std::max(k, i);
        return k;
    }

    // owners()[i-1] lists the 0-based positions l with i in I_l.
    std::vector<std::vector<int>> owners() const {
        std::vector<std::vector<int>> own(static_cast<std::size_t>(max_index()));
        for (std::size_t l = 0; l < index_sets.size(); ++l)
            for (int i : index_sets[l]) own[static_cast<std::size_t>(i - 1)].push_back(static_cast<int>(l));
        return own;
    }

    void validate() const {
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("MomentSpec: beta outside (0,1)");
        if (multiplicity < 1) throw std::invalid_argument("MomentSpec: multiplicity < 1");
        double bp = multiplicity * beta - multiplicity + 1.0;
        if (!(bp > 0.0 && bp < 1.0))
            throw std::invalid_argument("MomentSpec: p*beta - p + 1 outside (0,1)");
        if (index_sets.empty() || index_sets.size() != times.size())
            throw std::invalid_argument("MomentSpec: index_sets/times size mismatch");
        for (const auto& is : index_sets) {
            if (static_cast<int>(is.size()) != multiplicity)
                throw std::invalid_argument("MomentSpec: index set size != multiplicity");
            for (std::size_t j = 0; j < is.size(); ++j) {
                if (is[j] < 1) throw std::invalid_argument("MomentSpec: indices must be positive");
                if (j > 0 && is[j] <= is[j - 1])
                    throw std::invalid_argument("MomentSpec: index sets must be strictly increasing");
            }
        }
        for (double t : times) {
            if (t < 0.0) throw std::invalid_argument("MomentSpec: negative time");
            if (t > 1.0)
                throw std::invalid_argument("MomentSpec: time > 1 not supported (rescale by self-similarity)");
        }
    }
};

enum class MomentMethod { closed_form, quadrature, monte_carlo };

inline std::string to_string(MomentMethod m) {
    switch (m) {
        case MomentMethod::closed_form: return "closed_form";
        case MomentMethod::quadrature: return "quadrature";
        case MomentMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    MomentMethod method = MomentMethod::quadrature;
    bool reached_target = true;  // false flags a partial result (budget exhausted first)
    long evaluations = 0;
};

struct IntegrationBudget {
    long max_evaluations = 1'000'000;
    double target_rel_error = 0.005;
};

inline double closed_increment_moment(double beta, int p, int r, double s, double t) {
    double bp = p * beta - p + 1.0;
    if (!(bp > 0.0 && bp < 1.0))
        throw std::invalid_argument("closed_increment_moment: p*beta - p + 1 outside (0,1)");
    if (r < 1) throw std::invalid_argument("closed_increment_moment: r < 1");
    if (!(0.0 <= s && s <= t && t <= 1.0))
        throw std::invalid_argument("closed_increment_moment: need 0 <= s <= t <= 1");
    double lead = std::pow(gamma_pair(beta), p) * std::tgamma(static_cast<double>(r) + 1.0) /
                  (std::tgamma(bp) * std::tgamma((r - 1) * bp + 2.0));
    return lead * std::pow(t - s, (r - 1) * bp + 1.0);
}

namespace detail {

// One ordering stratum of the moment integral. Within the stratum the
// integrand is a product of gap powers between ranked coordinates (plus anchor
// gaps to the shifts in the conditional case); the proposal samples each
// ranked coordinate from a Beta(gamma+1, 1)-type density on its feasible gap,
// with gamma matching the total singularity multiplicity at that rank, so
// importance weights stay bounded.
struct StratumPlan {
    std::vector<int> perm;          // rank j -> position l
    std::vector<double> caps;       // effective upper bound per rank
    std::vector<double> floors;     // per-rank lower floor (0 when unconditioned)
    std::vector<double> gap_exp;    // proposal exponent gamma_j per rank
    struct PairFactor { int lo_rank; int hi_rank; };
    std::vector<PairFactor> pairs;  // (y_hi - y_lo)^{beta-1}
    struct AnchorFactor { int rank; double anchor; };
    std::vector<AnchorFactor> anchors;  // (y_rank - anchor)^{beta-1}
    double log_const = 0.0;
    bool empty_domain = false;
};

inline StratumPlan build_stratum(const MomentSpec& spec, const std::vector<int>& perm,
                                 const std::vector<std::vector<int>>& owners,
                                 std::span<const double> shifts,  // size K or empty
                                 std::span<const double> floors_by_pos) {
    const int r = spec.order();
    const bool anchored = !shifts.empty();
    StratumPlan plan;
    plan.perm = perm;
    plan.caps.resize(static_cast<std::size_t>(r));
    plan.floors.resize(static_cast<std::size_t>(r));
    plan.gap_exp.assign(static_cast<std::size_t>(r), 0.0);

    std::vector<int> rank_of(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) rank_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] = j;

    double cap = 1.0;
    for (int j = r - 1; j >= 0; --j) {
        cap = std::min(cap, spec.times[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
        plan.caps[static_cast<std::size_t>(j)] = cap;
    }
    double running_floor = 0.0;
    for (int j = 0; j < r; ++j) {
        double fl = floors_by_pos.empty() ? 0.0 : floors_by_pos[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        plan.floors[static_cast<std::size_t>(j)] = fl;
        running_floor = std::max(running_floor, fl);
        if (running_floor >= plan.caps[static_cast<std::size_t>(j)]) {
            plan.empty_domain = true;
            return plan;
        }
    }

    const double log_gg = std::log(gamma_pair(spec.beta));
    for (std::size_t i = 0; i < owners.size(); ++i) {
        const auto& own = owners[i];
        if (own.empty()) continue;
        std::vector<int> ranks;
        ranks.reserve(own.size());
        for (int l : own) ranks.push_back(rank_of[static_cast<std::size_t>(l)]);
        std::sort(ranks.begin(), ranks.end());
        if (anchored) {
            plan.anchors.push_back({ranks.front(), shifts[i]});
            plan.gap_exp[static_cast<std::size_t>(ranks.front())] += spec.beta - 1.0;
        } else {
            plan.log_const += log_gg;
        }
        for (std::size_t a = 1; a < ranks.size(); ++a) {
            plan.pairs.push_back({ranks[a - 1], ranks[a]});
            plan.gap_exp[static_cast<std::size_t>(ranks[a])] += spec.beta - 1.0;
        }
    }
    return plan;
}

struct StratumResult {
    double mean = 0.0;
    double var_of_mean = 0.0;
    long n = 0;
};

inline StratumResult sample_stratum(const MomentSpec& spec, const StratumPlan& plan,
                                    long n_samples, RngStream& rng) {
    StratumResult res;
    if (plan.empty_domain || n_samples <= 0) return res;
    const int r = spec.order();
    const double bm1 = spec.beta - 1.0;
    std::vector<double> y(static_cast<std::size_t>(r));
    std::vector<double> log_gap(static_cast<std::size_t>(r));  // gap from the sampling lower bound
    std::vector<bool> floor_bound(static_cast<std::size_t>(r));
    double sum = 0.0, sum_sq = 0.0;
    for (long s = 0; s < n_samples; ++s) {
        double log_q = 0.0;
        double prev = 0.0;
        bool dead = false;
        for (int j = 0; j < r && !dead; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            double lb = std::max(prev, plan.floors[ju]);
            double ub = plan.caps[ju];
            if (!(ub > lb)) { dead = true; break; }
            double gamma = plan.gap_exp[ju];
            double u = uniform_open(rng);
            double lg = std::log(ub - lb) + std::log(u) / (gamma + 1.0);
            log_gap[ju] = lg;
            floor_bound[ju] = plan.floors[ju] > prev;
            y[ju] = lb + std::exp(lg);
            log_q += std::log(gamma + 1.0) - std::log(ub - lb) + (gamma / (gamma + 1.0)) * std::log(u);
            prev = y[ju];
        }
        if (dead) continue;  // zero-measure corner; contributes 0
        double log_f = plan.log_const;
        for (const auto& pf : plan.pairs) {
            const auto hi = static_cast<std::size_t>(pf.hi_rank);
            if (pf.hi_rank == pf.lo_rank + 1 && !floor_bound[hi]) {
                log_f += bm1 * log_gap[hi];  // exact log of the sampled gap
            } else {
                log_f += bm1 * std::log(y[hi] - y[static_cast<std::size_t>(pf.lo_rank)]);
            }
        }
        for (const auto& af : plan.anchors) {
            const auto ju = static_cast<std::size_t>(af.rank);
            double lb = (af.rank == 0) ? std::max(0.0, plan.floors[0])
                                       : std::max(y[ju - 1], plan.floors[ju]);
            if (af.anchor == lb) {
                log_f += bm1 * log_gap[ju];
            } else {
                log_f += bm1 * std::log(y[ju] - af.anchor);
            }
        }
        double w = std::exp(log_f - log_q);
        sum += w;
        sum_sq += w * w;
    }
    res.n = n_samples;
    res.mean = sum / static_cast<double>(n_samples);
    if (n_samples > 1) {
        double var = (sum_sq - sum * sum / static_cast<double>(n_samples)) /
                     static_cast<double>(n_samples - 1);
        res.var_of_mean = std::max(0.0, var) / static_cast<double>(n_samples);
    }
    return res;
}

// Core integral int prod-of-kernels dx over the box (floors, times), by
// summing ordering strata. `shifts` empty selects the stationary kernels.
inline MomentEstimate integrate_moment(const MomentSpec& spec, std::span<const double> shifts,
                                       std::span<const double> floors_by_pos,
                                       const IntegrationBudget& budget, std::uint64_t seed) {
    const int r = spec.order();
    auto owners = spec.owners();
    std::vector<int> perm(static_cast<std::size_t>(r));
    std::iota(perm.begin(), perm.end(), 0);
    long n_strata = 1;
    for (int j = 2; j <= r; ++j) n_strata *= j;
    const long per_stratum = std::max<long>(2, budget.max_evaluations / n_strata);

    MomentEstimate est;
    est.method = MomentMethod::quadrature;
    double total = 0.0, total_var = 0.0;
    long stratum_index = 0;
    do {
        auto plan = build_stratum(spec, perm, owners, shifts, floors_by_pos);
        auto rng = make_stream(seed, "moment-stratum", static_cast<std::uint64_t>(stratum_index));
        auto res = sample_stratum(spec, plan, plan.empty_domain ? 0 : per_stratum, rng);
        total += res.mean;
        total_var += res.var_of_mean;
        est.evaluations += res.n;
        ++stratum_index;
    } while (std::next_permutation(perm.begin(), perm.end()));

    est.value = total;
    est.std_error = std::sqrt(total_var);
    est.reached_target =
        est.value != 0.0 && est.std_error / std::fabs(est.value) <= budget.target_rel_error;
    return est;
}

}  // namespace detail

// E prod_l L_{I_l, t_l} with i.i.d. stationary shifts. Dispatches to the
// closed form when all index sets and times coincide.
inline MomentEstimate joint_moment(const MomentSpec& spec, const IntegrationBudget& budget,
                                   std::uint64_t seed) {
    spec.validate();
    const int r = spec.order();
    for (double t : spec.times) {
        if (t == 0.0) return {0.0, 0.0, MomentMethod::closed_form, true, 0};
    }
    bool all_equal = true;
    for (int l = 1; l < r && all_equal; ++l)
        all_equal = spec.index_sets[static_cast<std::size_t>(l)] == spec.index_sets[0] &&
                    spec.times[static_cast<std::size_t>(l)] == spec.times[0];
    if (all_equal) {
        double v = closed_increment_moment(spec.beta, spec.multiplicity, r, 0.0, spec.times[0]);
        return {v, 0.0, MomentMethod::closed_form, true, 0};
    }
    auto est = detail::integrate_moment(spec, {}, {}, budget, seed);
    double norm = std::pow(std::tgamma(spec.multiplicity * spec.beta - spec.multiplicity + 1.0),
                           -static_cast<double>(r));
    est.value *= norm;
    est.std_error *= norm;
    return est;
}

// Conditional moment given deterministic shifts v in (0,1)^K: zero exactly when
// some index set already exceeds its time horizon, otherwise the anchored-kernel
// integral over the shifted domain.
inline MomentEstimate joint_moment_given_shifts(const MomentSpec& spec,
                                                std::span<const double> shifts,
                                                const IntegrationBudget& budget,
                                                std::uint64_t seed) {
    spec.validate();
    const int k = spec.max_index();
    if (static_cast<int>(shifts.size()) != k)
        throw std::invalid_argument("joint_moment_given_shifts: need one shift per index");
    for (double v : shifts)
        if (!(v > 0.0 && v < 1.0))
            throw std::invalid_argument("joint_moment_given_shifts: shifts must lie in (0,1)");

    const int r = spec.order();
    std::vector<double> floors(static_cast<std::size_t>(r), 0.0);
    for (int l = 0; l < r; ++l) {
        double mx = 0.0;
        for (int i : spec.index_sets[static_cast<std::size_t>(l)])
            mx = std::max(mx, shifts[static_cast<std::size_t>(i - 1)]);
        floors[static_cast<std::size_t>(l)] = mx;
        if (mx >= spec.times[static_cast<std::size_t>(l)])
            return {0.0, 0.0, MomentMethod::closed_form, true, 0};
    }
    auto est = detail::integrate_moment(spec, shifts, floors, budget, seed);
    double norm = std::pow(std::tgamma(spec.multiplicity * spec.beta - spec.multiplicity + 1.0),
                           -static_cast<double>(r));
    est.value *= norm;
    est.std_error *= norm;
    return est;
}

}  // namespace regenlab

// Concrete infinite-measure-preserving systems with a regularly varying return
// structure, used to drive the partial-sum experiments.
//
// Renewal backend: the countdown chain on {0,1,2,...} where state 0 draws a
// fresh return time tau and jumps to tau-1, and state j >= 1 moves to j-1. With
// P(tau > n) = (n+1)^{-beta} the invariant measure pi_j = P(tau > j) (pi_0 = 1),
// the wandering rate w_n and the one-step return probabilities are all exact.
// Orbits are represented by their visit times to the base set A = {state 0};
// states between visits are countdowns and can be reconstructed from the visit
// list, which is how cylinder integrands are evaluated by lookahead.
//
// Thaler backend: the interval map with an indifferent fixed point at 0 and
// invariant density x^{-q} + (1+x)^{-q} on (0,1]; qualitative orbit statistics
// only (no constructive sampler for the continuum analogue of the entry law is
// available), the quantitative experiments run on the chain.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "regenlab/covering.hpp"
#include "regenlab/kernels.hpp"
#include "regenlab/levy.hpp"
#include "regenlab/local_time.hpp"
#include "regenlab/mstable.hpp"
#include "regenlab/rng.hpp"

namespace regenlab {

class RenewalChainModel {
  public:
    explicit RenewalChainModel(double beta,
                               std::function<double(long)> return_tail = nullptr)
        : beta_(beta), tail_fn_(std::move(return_tail)) {
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("RenewalChainModel: beta outside (0,1)");
    }

    double beta() const { return beta_; }

    // P(tau > n), n >= 0; default (n+1)^{-beta}. P(tau > 0) = 1 always.
    double return_tail(long n) const {
        if (n < 0) return 1.0;
        if (tail_fn_) return n == 0 ? 1.0 : tail_fn_(n);
        return std::pow(static_cast<double>(n) + 1.0, -beta_);
    }

    // P(tau = k), k >= 1
    double return_prob(long k) const { return return_tail(k - 1) - return_tail(k); }

    // invariant measure of state j under pi_0 = 1 normalization
    double invariant_mass(long j) const { return return_tail(j); }

    long sample_return(RngStream& rng) const {
        if (!tail_fn_) {
            // tau = floor(U^{-1/beta}) realizes P(tau > k) = (k+1)^{-beta}
            double w = std::pow(uniform_open(rng), -1.0 / beta_);
            if (w >= 9.2e18) return static_cast<long>(9.2e18);
            return static_cast<long>(w);
        }
        // generic inverse CDF: smallest k >= 1 with return_tail(k) <= u
        double u = uniform_open(rng);
        long hi = 1;
        while (return_tail(hi) > u) {
            if (hi > (1L << 60)) break;
            hi *= 2;
        }
        long lo = hi / 2;  // tail(lo) > u or lo = 0
        while (lo + 1 < hi) {
            long mid = lo + (hi - lo) / 2;
            if (return_tail(mid) > u)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    }

    // tau conditioned on tau <= n
    long sample_return_capped(long n, RngStream& rng) const {
        if (n < 1) throw std::invalid_argument("sample_return_capped: n < 1");
        if (!tail_fn_) {
            double tn = return_tail(n);
            double u = tn + uniform_open(rng) * (1.0 - tn);  // uniform on (tail(n), 1)
            long k = static_cast<long>(std::pow(u, -1.0 / beta_));
            return std::min(k, n);
        }
        for (;;) {
            long k = sample_return(rng);
            if (k <= n) return k;
        }
    }

  private:
    double beta_;
    std::function<double(long)> tail_fn_;
};

// w_n = mu(first entrance <= n) = P(tau <= n) + sum_{j=1}^n P(tau > j), exact.
inline double wandering_rate(const RenewalChainModel& model, long n) {
    if (n < 1) throw std::invalid_argument("wandering_rate: n < 1");
    double s = 1.0 - model.return_tail(n);
    for (long j = 1; j <= n; ++j) s += model.return_tail(j);
    return s;
}

// wandering_rate on an ascending grid of n values in one pass
inline std::vector<double> wandering_rates(const RenewalChainModel& model,
                                           std::span<const long> ns) {
    std::vector<double> out(ns.size());
    double cum = 0.0;
    long j = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        if (k > 0 && ns[k] < ns[k - 1])
            throw std::invalid_argument("wandering_rates: grid not ascending");
        while (j < ns[k]) {
            ++j;
            cum += model.return_tail(j);
        }
        out[k] = cum + 1.0 - model.return_tail(ns[k]);
    }
    return out;
}

// b_n := Gamma(beta) Gamma(2-beta) w_n, the uniform-return normalization used
// as an exact definition at finite n.
inline double uniform_return_rate(const RenewalChainModel& model, long n) {
    return gamma_pair(model.beta()) * wandering_rate(model, n);
}

// Exact return probabilities u_n = P(chain started at 0 is at 0 at time n) via
// the renewal recursion u_n = sum_{k<=n} P(tau = k) u_{n-k}.
inline std::vector<double> renewal_sequence(const RenewalChainModel& model, long n_max) {
    if (n_max < 1) throw std::invalid_argument("renewal_sequence: n_max < 1");
    std::vector<double> f(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (long k = 1; k <= n_max; ++k) f[static_cast<std::size_t>(k)] = model.return_prob(k);
    std::vector<double> u(static_cast<std::size_t>(n_max) + 1, 0.0);
    u[0] = 1.0;
    for (long n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (long k = 1; k <= n; ++k)
            s += f[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(n - k)];
        u[static_cast<std::size_t>(n)] = s;
    }
    return u;
}

struct FlowState {
    long chain_state = 0;
    // set on the state-0 branch of the entry law: first return conditioned <= n
    std::optional<long> pending_first_return;
};

// Sampler for the normalized entry law mu_n = mu(. ∩ {entrance <= n}) / w_n:
// start state j with weight pi_j (1 <= j <= n) and the state-0 branch with
// weight P(tau <= n), whose first return is conditioned to tau <= n.
class EntrySampler {
  public:
    EntrySampler(const RenewalChainModel& model, long n) : model_(model), n_(n) {
        if (n < 1) throw std::invalid_argument("EntrySampler: n < 1");
        cum_.resize(static_cast<std::size_t>(n) + 1);
        cum_[0] = 1.0 - model.return_tail(n);  // state-0 branch mass
        for (long j = 1; j <= n; ++j)
            cum_[static_cast<std::size_t>(j)] =
                cum_[static_cast<std::size_t>(j - 1)] + model.invariant_mass(j);
        w_n_ = cum_.back();
    }

    double wandering_rate() const { return w_n_; }
    long horizon() const { return n_; }

    FlowState sample(RngStream& rng) const {
        double u = uniform(rng, 0.0, w_n_);
        auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        long j = static_cast<long>(it - cum_.begin());
        if (j == 0) return {0, model_.sample_return_capped(n_, rng)};
        return {j, std::nullopt};
    }

  private:
    RenewalChainModel model_;
    long n_;
    double w_n_ = 0.0;
    std::vector<double> cum_;
};

inline FlowState sample_entry_state(const RenewalChainModel& model, long n, RngStream& rng) {
    return EntrySampler(model, n).sample(rng);
}

// Visit times k in [1, horizon_steps] at which the orbit is in the base set A.
// Everything between visits is a deterministic countdown, so the visit list is
// a complete orbit description.
inline std::vector<long> orbit_visits(const RenewalChainModel& model, const FlowState& start,
                                      long horizon_steps, RngStream& rng) {
    std::vector<long> visits;
    long t;
    if (start.chain_state >= 1) {
        t = start.chain_state;
    } else {
        t = start.pending_first_return ? *start.pending_first_return
                                       : model.sample_return(rng);
    }
    while (t <= horizon_steps) {
        visits.push_back(t);
        t += model.sample_return(rng);
    }
    return visits;
}

// Product-cylinder integrand on A^p. Each factor fixes the next `states`
// coordinates of the orbit after a visit; an empty word is the plain indicator
// of A. Factor measures are exact transition-probability products.
struct CylinderWord {
    std::vector<long> states;
};

struct IntegrandSpec {
    std::vector<CylinderWord> factors;  // size p; empty factors = 1_A
    double coefficient = 1.0;           // scalar multiple of the product

    static IntegrandSpec indicator(int p) {
        IntegrandSpec f;
        f.factors.resize(static_cast<std::size_t>(p));
        return f;
    }

    std::size_t max_word_length() const {
        std::size_t m = 0;
        for (const auto& w : factors) m = std::max(m, w.states.size());
        return m;
    }
};

inline double integrand_factor_measure(const RenewalChainModel& model, const CylinderWord& w) {
    double m = 1.0;  // pi_0 = 1
    long prev = 0;
    for (long s : w.states) {
        if (prev == 0) {
            m *= model.return_prob(s + 1);  // 0 -> s has probability P(tau = s+1)
        } else if (s != prev - 1) {
            return 0.0;
        }
        prev = s;
    }
    return m;
}

inline double product_measure(const RenewalChainModel& model, const IntegrandSpec& f) {
    double m = f.coefficient;
    for (const auto& w : f.factors) m *= integrand_factor_measure(model, w);
    return m;
}

namespace detail {

// Does orbit j (described by its visit list) match the word after a visit at
// time k? visit_pos points at the entry equal to k. State at time q between
// visits a < q < b is b - q; at a visit it is 0.
inline bool word_matches(const std::vector<long>& visits, std::size_t visit_pos,
                         const CylinderWord& word) {
    std::size_t vp = visit_pos;
    long k = visits[vp];
    for (std::size_t off = 1; off <= word.states.size(); ++off) {
        long q = k + off;
        while (vp < visits.size() && visits[vp] < q) ++vp;
        if (vp >= visits.size()) return false;  // not enough lookahead generated
        long state = visits[vp] - q;
        if (state != word.states[off - 1]) return false;
    }
    return true;
}

// All times common to every visit list, with per-list positions handed to fn.
// Lists is indexable by j and yields const std::vector<long>&.
template <class Lists, class Fn>
void for_each_simultaneous_visit(const Lists& visit_lists, std::size_t p, long limit,
                                 Fn&& fn) {
    std::vector<std::size_t> pos(p, 0);
    if (p == 0) return;
    for (;;) {
        long t = 0;
        for (std::size_t j = 0; j < p; ++j) {
            const std::vector<long>& v = visit_lists[j];
            if (pos[j] >= v.size()) return;
            t = std::max(t, v[pos[j]]);
        }
        if (t > limit) return;
        bool common = true;
        for (std::size_t j = 0; j < p; ++j) {
            const std::vector<long>& v = visit_lists[j];
            while (pos[j] < v.size() && v[pos[j]] < t) ++pos[j];
            if (pos[j] >= v.size()) return;
            if (v[pos[j]] != t) common = false;
        }
        if (common) {
            fn(t, std::span<const std::size_t>(pos));
            for (std::size_t j = 0; j < p; ++j) ++pos[j];
        }
    }
}

}  // namespace detail

// L_{n,I,t} = (b_n^p / n) sum_{k <= floor(nt)} f(T^k orbit_1, ..., T^k orbit_p),
// computed from precomputed visit lists (one per element of I).
inline double flow_local_time_from_visits(std::span<const std::vector<long>> visit_lists,
                                          long n, double t, const IntegrandSpec& f,
                                          double b_n) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("flow_local_time: t outside [0,1]");
    if (visit_lists.size() != f.factors.size())
        throw std::invalid_argument("flow_local_time: integrand arity mismatch");
    const long limit = static_cast<long>(static_cast<double>(n) * t);
    double sum = 0.0;
    detail::for_each_simultaneous_visit(visit_lists, visit_lists.size(), limit,
                                        [&](long /*k*/, std::span<const std::size_t> pos) {
        double v = f.coefficient;
        for (std::size_t j = 0; j < visit_lists.size() && v != 0.0; ++j) {
            if (!f.factors[j].states.empty() &&
                !detail::word_matches(visit_lists[j], pos[j], f.factors[j]))
                v = 0.0;
        }
        sum += v;
    });
    const auto p = static_cast<double>(visit_lists.size());
    return std::pow(b_n, p) * sum / static_cast<double>(n);
}

// Convenience wrapper: iterate p orbits started from the given entry states.
inline double flow_local_time(const RenewalChainModel& model, long n, double t,
                              const IntegrandSpec& f, std::span<const FlowState> states,
                              RngStream& rng) {
    std::vector<std::vector<long>> visits;
    visits.reserve(states.size());
    const long lookahead = static_cast<long>(f.max_word_length());
    for (const auto& s : states) visits.push_back(orbit_visits(model, s, n + lookahead, rng));
    return flow_local_time_from_visits(visits, n, t, f, uniform_return_rate(model, n));
}

struct PartialSumPath {
    std::vector<double> grid;
    std::vector<double> values;
    double c_n = 0.0;
    double w_n = 0.0;
};

// Precomputed per-n context for the partial-sum experiments.
struct FlowSeriesContext {
    RenewalChainModel model;
    long n;
    EntrySampler entry;
    double w_n;
    double b_n;

    FlowSeriesContext(const RenewalChainModel& m, long n_)
        : model(m), n(n_), entry(m, n_), w_n(entry.wandering_rate()),
          b_n(gamma_pair(m.beta()) * entry.wandering_rate()) {}
};

inline double partial_sum_normalization(const FlowSeriesContext& ctx, const LevyModel& levy,
                                        int p) {
    return static_cast<double>(ctx.n) *
           std::pow(levy.tail_inverse(1.0 / ctx.w_n) / ctx.b_n, p);
}

// One replication of the normalized partial-sum path
//   S_n(t) = (1/c_n) sum_{k <= floor(nt)} X_k
// with X_k the truncated multilinear series over index sets I in D_p(m),
// weights prod_i sign_i rho_inv(arrival_i / w_n), and the integrand evaluated
// along p independent mu_n-started orbits per index.
inline PartialSumPath sample_partial_sum(const FlowSeriesContext& ctx, const LevyModel& levy,
                                         const SeriesTruncation& trunc, const IntegrandSpec& f,
                                         std::span<const double> grid, RngStream& rng) {
    const int p = static_cast<int>(f.factors.size());
    if (p < 1) throw std::invalid_argument("sample_partial_sum: empty integrand");
    trunc.validate(p);
    const int m = trunc.active_max_index;

    std::vector<int> signs(static_cast<std::size_t>(trunc.n_arrivals));
    std::vector<double> arrivals(static_cast<std::size_t>(trunc.n_arrivals));
    double g = 0.0;
    for (int i = 0; i < trunc.n_arrivals; ++i) {
        signs[static_cast<std::size_t>(i)] = rademacher(rng);
        g += exponential(rng);
        arrivals[static_cast<std::size_t>(i)] = g;
    }
    const long lookahead = static_cast<long>(f.max_word_length());
    std::vector<std::vector<long>> visits(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        visits[static_cast<std::size_t>(i)] =
            orbit_visits(ctx.model, ctx.entry.sample(rng), ctx.n + lookahead, rng);

    PartialSumPath out;
    out.grid.assign(grid.begin(), grid.end());
    out.values.assign(grid.size(), 0.0);
    out.w_n = ctx.w_n;
    out.c_n = partial_sum_normalization(ctx, levy, p);

    std::vector<long> limits(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        if (grid[gi] < 0.0 || grid[gi] > 1.0)
            throw std::invalid_argument("sample_partial_sum: grid outside [0,1]");
        limits[gi] = static_cast<long>(static_cast<double>(ctx.n) * grid[gi]);
    }
    const long max_limit = limits.empty() ? 0 : *std::max_element(limits.begin(), limits.end());

    double p_fact = 1.0;
    for (int j = 2; j <= p; ++j) p_fact *= j;

    detail::for_each_index_set(m, p, [&](std::span<const int> idx) {
        double w = p_fact;
        for (int i : idx)
            w *= signs[static_cast<std::size_t>(i)] *
                 levy.tail_inverse(arrivals[static_cast<std::size_t>(i)] / ctx.w_n);
        auto sel = [&](std::size_t j) -> const std::vector<long>& {
            return visits[static_cast<std::size_t>(idx[j])];
        };
        struct Indexer {
            decltype(sel)& get;
            const std::vector<long>& operator[](std::size_t j) const { return get(j); }
        } indexer{sel};
        detail::for_each_simultaneous_visit(indexer, static_cast<std::size_t>(p), max_limit,
                                            [&](long k, std::span<const std::size_t> pos) {
            double v = f.coefficient;
            for (std::size_t j = 0; j < static_cast<std::size_t>(p) && v != 0.0; ++j) {
                if (!f.factors[j].states.empty() &&
                    !detail::word_matches(sel(j), pos[j], f.factors[j]))
                    v = 0.0;
            }
            if (v != 0.0) {
                for (std::size_t gi = 0; gi < limits.size(); ++gi)
                    if (k <= limits[gi]) out.values[gi] += w * v;
            }
        });
    });
    for (auto& v : out.values) v /= out.c_n;
    return out;
}

// --- Thaler interval map -------------------------------------------------

struct ThalerMapModel {
    double q = 2.0;          // beta = 1/q
    double base_lo = 0.5;    // A = [base_lo, 1]

    void validate() const {
        if (!(q > 1.0)) throw std::invalid_argument("ThalerMapModel: q must exceed 1");
        if (!(base_lo > 0.0 && base_lo < 1.0))
            throw std::invalid_argument("ThalerMapModel: base_lo outside (0,1)");
    }

    double beta() const { return 1.0 / q; }
};

// T_q(x) = x (1 + (x/(1+x))^{q-1} - x^{q-1})^{1/(1-q)}  (mod 1); indifferent
// fixed point at 0. x = 0 is absorbing (orbit trapped).
inline double thaler_step(const ThalerMapModel& model, double x) {
    model.validate();
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("thaler_step: x outside [0,1]");
    if (x == 0.0) return 0.0;
    double inner = 1.0 + std::pow(x / (1.0 + x), model.q - 1.0) - std::pow(x, model.q - 1.0);
    double y = x * std::pow(inner, 1.0 / (1.0 - model.q));
    if (y >= 1.0) y -= 1.0;
    return y;
}

inline double thaler_invariant_density(const ThalerMapModel& model, double x) {
    if (!(x > 0.0 && x <= 1.0))
        throw std::invalid_argument("thaler_invariant_density: x outside (0,1]");
    return std::pow(x, -model.q) + std::pow(1.0 + x, -model.q);
}

struct ThalerOrbitStats {
    long steps = 0;
    long visits_to_base = 0;
    double occupation_fraction = 0.0;
    std::vector<long> return_times;  // gaps between consecutive visits to A
    bool trapped_at_zero = false;
};

inline ThalerOrbitStats thaler_orbit_stats(const ThalerMapModel& model, double x0, long n) {
    model.validate();
    if (!(x0 > 0.0 && x0 <= 1.0))
        throw std::invalid_argument("thaler_orbit_stats: x0 outside (0,1]");
    ThalerOrbitStats st;
    st.steps = n;
    double x = x0;
    long last_visit = 0;
    bool seen_visit = false;
    for (long k = 1; k <= n; ++k) {
        x = thaler_step(model, x);
        if (x == 0.0) {
            st.trapped_at_zero = true;
            st.steps = k;
            break;
        }
        if (x >= model.base_lo) {
            ++st.visits_to_base;
            if (seen_visit) st.return_times.push_back(k - last_visit);
            last_visit = k;
            seen_visit = true;
        }
    }
    if (st.steps > 0)
        st.occupation_fraction =
            static_cast<double>(st.visits_to_base) / static_cast<double>(st.steps);
    return st;
}

}  // namespace regenlab

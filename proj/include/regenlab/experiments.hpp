// Config-driven experiment runners tying the modules together. Each runner is
// deterministic given (params, master_seed): replication i draws its stream
// from (master_seed, kind-tag, i) and aggregation is index-ordered, so the
// worker count never changes the output. Pass/fail thresholds are parameters
// with defaults taken from the project acceptance settings, never hard-coded
// inside the computation.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regenlab/covering.hpp"
#include "regenlab/csv.hpp"
#include "regenlab/ergodic.hpp"
#include "regenlab/interval_set.hpp"
#include "regenlab/kernels.hpp"
#include "regenlab/levy.hpp"
#include "regenlab/local_time.hpp"
#include "regenlab/moments.hpp"
#include "regenlab/mstable.hpp"
#include "regenlab/rng.hpp"
#include "regenlab/stats.hpp"

namespace regenlab {

inline constexpr const char* library_version = "0.1.0";

struct RunOptions {
    int threads = 1;
    std::string out_dir;  // empty: no files written
};

struct StatSummary {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<std::pair<double, double>> quantiles;
    std::optional<double> ks_statistic;
    std::optional<double> ks_pvalue;
    long n_samples = 0;
    bool pass = true;
    std::vector<std::string> warnings;
    nlohmann::json details;  // knobs, per-row tables, z-scores

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["mean"] = mean;
        j["std_error"] = std_error;
        j["n_samples"] = n_samples;
        j["pass"] = pass;
        if (!quantiles.empty()) {
            nlohmann::json q = nlohmann::json::array();
            for (auto [p, v] : quantiles) q.push_back({p, v});
            j["quantiles"] = q;
        }
        if (ks_statistic) j["ks_statistic"] = *ks_statistic;
        if (ks_pvalue) j["ks_pvalue"] = *ks_pvalue;
        if (!warnings.empty()) j["warnings"] = warnings;
        j["details"] = details;
        j["library_version"] = library_version;
        return j;
    }
};

namespace detail {

// Deterministic replication map: results land by index, aggregation follows
// index order regardless of the thread count.
template <class T, class Fn>
std::vector<T> replicate(long n, int threads, Fn fn) {
    std::vector<T> out(static_cast<std::size_t>(n));
    if (threads <= 1 || n < 2 * threads) {
        for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(threads));
    const long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        long lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, [&out, &fn, lo, hi] {
            for (long i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        }));
    }
    for (auto& f : futs) f.get();
    return out;
}

inline void write_summary_json(const RunOptions& opts, const std::string& kind,
                               const StatSummary& summary) {
    if (opts.out_dir.empty()) return;
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream out(std::filesystem::path(opts.out_dir) / (kind + "_summary.json"));
    if (!out) throw std::runtime_error("cannot write summary for " + kind);
    out << summary.to_json().dump(2) << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// covering_check: Monte Carlo frequency of q probe points being left uncovered
// versus the exact closed form (e/eps)^{q(beta-1)} g_{q,eps}(x).
// ---------------------------------------------------------------------------

struct CoveringCheckParams {
    double beta = 0.6;
    double epsilon = 0.05;
    double horizon = 1.0;
    std::vector<double> probes = {0.5};  // q = probes.size(), q in {1,2}
    long replications = 100000;
    double z_tolerance = 3.0;
};

inline StatSummary run_covering_check(const CoveringCheckParams& p, std::uint64_t master_seed,
                                      const RunOptions& opts = {}) {
    const int q = static_cast<int>(p.probes.size());
    if (q < 1 || q > 2)
        throw std::invalid_argument("covering_check: need one or two probe points");
    std::vector<double> probes = p.probes;
    std::sort(probes.begin(), probes.end());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (!(probes[i] > 0.0 && probes[i] < p.horizon))
            throw std::invalid_argument("covering_check: probe outside (0,horizon)");
        if (i > 0 && probes[i] == probes[i - 1])
            throw std::invalid_argument("covering_check: probes must be distinct");
    }
    CoveringConfig cfg{p.beta, p.epsilon, p.horizon};
    cfg.validate();

    auto hits = detail::replicate<char>(p.replications, opts.threads, [&](long i) -> char {
        auto rng = make_stream(master_seed, "covering-check", static_cast<std::uint64_t>(i));
        auto s = sample_covering(cfg, rng);
        for (double x : probes)
            if (!s.uncovered.contains(x)) return 0;
        return 1;
    });
    long k = 0;
    for (char h : hits) k += h;
    const double n = static_cast<double>(p.replications);
    const double freq = static_cast<double>(k) / n;

    const double closed = std::pow(std::exp(1.0) / p.epsilon, q * (p.beta - 1.0)) *
                          anchored_gap_kernel_smoothed(p.beta, p.epsilon, probes);
    const double se = std::sqrt(closed * (1.0 - closed) / n);
    const double z = (freq - closed) / se;

    StatSummary out;
    out.mean = freq;
    out.std_error = std::sqrt(freq * (1.0 - freq) / n);
    out.n_samples = p.replications;
    out.pass = std::fabs(z) <= p.z_tolerance;
    if (p.z_tolerance * se > 0.5 * closed)
        out.warnings.push_back("underpowered: tolerance band wider than half the target");
    out.details = {{"kind", "covering_check"},
                   {"beta", p.beta},
                   {"epsilon", p.epsilon},
                   {"q", q},
                   {"probes", probes},
                   {"closed_form", closed},
                   {"z", z},
                   {"z_tolerance", p.z_tolerance},
                   {"seed", master_seed}};

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "covering_check.csv").string(),
                      {"x", "q", "beta", "epsilon", "n", "freq", "closed_form", "z"});
        std::string xs = CsvWriter::num(probes[0]);
        for (std::size_t i = 1; i < probes.size(); ++i) xs += ";" + CsvWriter::num(probes[i]);
        csv.row({xs, std::to_string(q), CsvWriter::num(p.beta), CsvWriter::num(p.epsilon),
                 std::to_string(p.replications), CsvWriter::num(freq), CsvWriter::num(closed),
                 CsvWriter::num(z)});
    }
    detail::write_summary_json(opts, "covering_check", out);
    return out;
}

// ---------------------------------------------------------------------------
// localtime_moments: MC moments of L_{I,t} for one index set against the
// closed-form increment moments.
// ---------------------------------------------------------------------------

struct LocaltimeMomentsParams {
    double beta = 0.75;
    int multiplicity = 2;
    double epsilon = 1e-4;
    double t = 1.0;
    long replications = 10000;
    std::vector<int> orders = {1, 2};
    std::vector<double> rel_tolerances = {0.05, 0.10};
};

inline StatSummary run_localtime_moments(const LocaltimeMomentsParams& p,
                                         std::uint64_t master_seed,
                                         const RunOptions& opts = {}) {
    LocalTimeParams params(p.beta, p.multiplicity);
    if (p.orders.size() != p.rel_tolerances.size())
        throw std::invalid_argument("localtime_moments: orders/tolerances size mismatch");
    CoveringConfig cfg{p.beta, p.epsilon, 1.0};

    auto ls = detail::replicate<double>(p.replications, opts.threads, [&](long i) {
        auto rng = make_stream(master_seed, "localtime-moments", static_cast<std::uint64_t>(i));
        std::vector<ShiftedCovering> fam;
        fam.reserve(static_cast<std::size_t>(p.multiplicity));
        for (int j = 0; j < p.multiplicity; ++j) {
            double v = sample_stationary_shift(p.beta, rng);
            fam.push_back({sample_covering(cfg, rng), v});
        }
        IntervalSet s = intersect_shifted(fam);
        return local_time_eps(s, 0.0, p.t, p.epsilon, params);
    });

    StatSummary out;
    auto base = summarize(ls);
    out.mean = base.mean;
    out.std_error = base.std_error;
    out.n_samples = p.replications;
    nlohmann::json rows = nlohmann::json::array();
    bool pass = true;
    for (std::size_t oi = 0; oi < p.orders.size(); ++oi) {
        int r = p.orders[oi];
        std::vector<double> powered(ls.size());
        for (std::size_t i = 0; i < ls.size(); ++i) powered[i] = std::pow(ls[i], r);
        auto st = summarize(powered);
        double target = closed_increment_moment(p.beta, p.multiplicity, r, 0.0, p.t);
        double rel = std::fabs(st.mean - target) / target;
        double z = (st.mean - target) / st.std_error;
        bool ok = rel <= p.rel_tolerances[oi];
        pass = pass && ok;
        rows.push_back({{"order", r},
                        {"mc_mean", st.mean},
                        {"mc_std_error", st.std_error},
                        {"closed_form", target},
                        {"rel_error", rel},
                        {"z", z},
                        {"rel_tolerance", p.rel_tolerances[oi]},
                        {"pass", ok}});
        if (st.std_error > 0.5 * p.rel_tolerances[oi] * target)
            out.warnings.push_back("underpowered for order " + std::to_string(r));
    }
    out.pass = pass;
    out.details = {{"kind", "localtime_moments"},
                   {"beta", p.beta},
                   {"p", p.multiplicity},
                   {"epsilon", p.epsilon},
                   {"t", p.t},
                   {"rows", rows},
                   {"seed", master_seed}};

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "moments.csv").string(),
                      {"spec_id", "method", "value", "std_error"});
        for (const auto& row : rows) {
            std::string id = "L^" + std::to_string(row["order"].get<int>());
            csv.row({id, "monte_carlo", CsvWriter::num(row["mc_mean"].get<double>()),
                     CsvWriter::num(row["mc_std_error"].get<double>())});
            csv.row({id, "closed_form", CsvWriter::num(row["closed_form"].get<double>()),
                     CsvWriter::num(0.0)});
        }
    }
    detail::write_summary_json(opts, "localtime_moments", out);
    return out;
}

// ---------------------------------------------------------------------------
// joint_moments: the oracle triangle (quadrature, local-time Monte Carlo and,
// when applicable, the closed form), optionally closed by the conditional-
// moment route integrated over the shift law.
// ---------------------------------------------------------------------------

struct JointMomentsParams {
    MomentSpec spec{0.75, 2, {{1, 2}, {2, 3}}, {1.0, 1.0}};
    double epsilon = 1e-4;
    long replications = 10000;
    IntegrationBudget budget{1'000'000, 0.005};
    double sigma_tolerance = 3.0;
    double quadrature_rel_se_max = 0.01;
    long psi_outer = 0;  // 0 disables the conditional-moment route
    IntegrationBudget psi_budget{20'000, 0.05};
};

inline StatSummary run_joint_moments(const JointMomentsParams& p, std::uint64_t master_seed,
                                     const RunOptions& opts = {}) {
    p.spec.validate();
    const int k = p.spec.max_index();
    LocalTimeParams params(p.spec.beta, p.spec.multiplicity);
    CoveringConfig cfg{p.spec.beta, p.epsilon, 1.0};

    MomentEstimate quad = joint_moment(p.spec, p.budget, derive_seed(master_seed, "joint-quad", 0));

    auto prods = detail::replicate<double>(p.replications, opts.threads, [&](long i) {
        auto rng = make_stream(master_seed, "joint-moments-mc", static_cast<std::uint64_t>(i));
        std::vector<double> shifts(static_cast<std::size_t>(k));
        std::vector<CoveringSample> covers;
        covers.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            shifts[static_cast<std::size_t>(j)] = sample_stationary_shift(p.spec.beta, rng);
            covers.push_back(sample_covering(cfg, rng));
        }
        double prod = 1.0;
        for (std::size_t l = 0; l < p.spec.index_sets.size(); ++l) {
            std::vector<ShiftedCovering> fam;
            for (int idx : p.spec.index_sets[l])
                fam.push_back({covers[static_cast<std::size_t>(idx - 1)],
                               shifts[static_cast<std::size_t>(idx - 1)]});
            IntervalSet s = intersect_shifted(fam);
            prod *= local_time_eps(s, 0.0, p.spec.times[l], p.epsilon, params);
        }
        return prod;
    });
    auto mc = summarize(prods);

    double combined = p.sigma_tolerance * std::sqrt(quad.std_error * quad.std_error +
                                                    mc.std_error * mc.std_error);
    bool triangle_ok = std::fabs(quad.value - mc.mean) <= combined;
    bool quad_ok = quad.std_error <= p.quadrature_rel_se_max * std::fabs(quad.value);

    StatSummary out;
    out.mean = quad.value;
    out.std_error = quad.std_error;
    out.n_samples = p.replications;
    out.details = {{"kind", "joint_moments"},
                   {"beta", p.spec.beta},
                   {"p", p.spec.multiplicity},
                   {"index_sets", p.spec.index_sets},
                   {"times", p.spec.times},
                   {"epsilon", p.epsilon},
                   {"quadrature", {{"value", quad.value},
                                   {"std_error", quad.std_error},
                                   {"evaluations", quad.evaluations},
                                   {"reached_target", quad.reached_target}}},
                   {"monte_carlo", {{"value", mc.mean}, {"std_error", mc.std_error}}},
                   {"triangle_pass", triangle_ok},
                   {"quadrature_precision_pass", quad_ok},
                   {"seed", master_seed}};
    out.pass = triangle_ok && quad_ok;

    bool all_equal = true;
    for (std::size_t l = 1; l < p.spec.index_sets.size(); ++l)
        all_equal = all_equal && p.spec.index_sets[l] == p.spec.index_sets[0] &&
                    p.spec.times[l] == p.spec.times[0];
    if (all_equal) {
        double cf = closed_increment_moment(p.spec.beta, p.spec.multiplicity,
                                            p.spec.order(), 0.0, p.spec.times[0]);
        bool cf_ok = std::fabs(mc.mean - cf) <= p.sigma_tolerance * mc.std_error;
        out.details["closed_form"] = cf;
        out.details["closed_form_pass"] = cf_ok;
        out.pass = out.pass && cf_ok;
    }

    if (p.psi_outer > 0) {
        auto psis = detail::replicate<double>(p.psi_outer, opts.threads, [&](long i) {
            auto rng = make_stream(master_seed, "joint-psi-outer", static_cast<std::uint64_t>(i));
            std::vector<double> v(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j) v[static_cast<std::size_t>(j)] =
                sample_stationary_shift(p.spec.beta, rng);
            auto est = joint_moment_given_shifts(p.spec, v, p.psi_budget,
                                                 derive_seed(master_seed, "joint-psi-inner",
                                                             static_cast<std::uint64_t>(i)));
            return est.value;
        });
        auto psi = summarize(psis);
        double band = p.sigma_tolerance * std::sqrt(psi.std_error * psi.std_error +
                                                    quad.std_error * quad.std_error);
        bool psi_ok = std::fabs(psi.mean - quad.value) <= band;
        out.details["psi_route"] = {{"value", psi.mean},
                                    {"std_error", psi.std_error},
                                    {"outer_samples", p.psi_outer},
                                    {"pass", psi_ok}};
        out.pass = out.pass && psi_ok;
    }

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "moments.csv").string(),
                      {"spec_id", "method", "value", "std_error"});
        std::string id = "joint";
        csv.row({id, "quadrature", CsvWriter::num(quad.value), CsvWriter::num(quad.std_error)});
        csv.row({id, "monte_carlo", CsvWriter::num(mc.mean), CsvWriter::num(mc.std_error)});
        if (out.details.contains("closed_form"))
            csv.row({id, "closed_form",
                     CsvWriter::num(out.details["closed_form"].get<double>()),
                     CsvWriter::num(0.0)});
    }
    detail::write_summary_json(opts, "joint_moments", out);
    return out;
}

// ---------------------------------------------------------------------------
// z_selfsim: two independent path ensembles test Z(c t0) =d c^H Z(t0).
// ---------------------------------------------------------------------------

struct ZSelfsimParams {
    double alpha = 0.8;
    double beta = 0.75;
    int multiplicity = 2;
    double t0 = 0.5;
    double scale = 2.0;  // compares Z(scale*t0) with scale^H Z(t0)
    long n_paths = 2000;
    SeriesTruncation truncation{12, 50};
    double epsilon = 1e-4;
    double ks_level = 0.01;
};

inline StatSummary run_z_selfsim(const ZSelfsimParams& p, std::uint64_t master_seed,
                                 const RunOptions& opts = {}) {
    if (!(p.t0 > 0.0 && p.scale * p.t0 <= 1.0))
        throw std::invalid_argument("z_selfsim: need 0 < t0 and scale*t0 <= 1");
    const double h = hurst_exponent(p.alpha, p.beta, p.multiplicity);
    const std::vector<double> grid = {p.t0, p.scale * p.t0};

    auto scaled_vals = detail::replicate<double>(p.n_paths, opts.threads, [&](long i) {
        auto rng = make_stream(master_seed, "z-selfsim-a", static_cast<std::uint64_t>(i));
        auto path = sample_multistable_path(p.alpha, p.beta, p.multiplicity, p.truncation,
                                            p.epsilon, grid, rng);
        return path.values[1];  // Z(scale*t0)
    });
    auto base_vals = detail::replicate<double>(p.n_paths, opts.threads, [&](long i) {
        auto rng = make_stream(master_seed, "z-selfsim-b", static_cast<std::uint64_t>(i));
        auto path = sample_multistable_path(p.alpha, p.beta, p.multiplicity, p.truncation,
                                            p.epsilon, grid, rng);
        return std::pow(p.scale, h) * path.values[0];  // scale^H Z(t0)
    });

    auto ks = ks_two_sample(scaled_vals, base_vals);
    StatSummary out;
    out.ks_statistic = ks.statistic;
    out.ks_pvalue = ks.p_value;
    out.n_samples = p.n_paths;
    auto s = summarize(scaled_vals);
    out.mean = s.mean;
    out.std_error = s.std_error;
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9})
        out.quantiles.emplace_back(q, quantile(scaled_vals, q));
    out.pass = ks.p_value > p.ks_level;
    if (ks_two_sample_critical(p.ks_level, static_cast<std::size_t>(p.n_paths),
                               static_cast<std::size_t>(p.n_paths)) > 0.15)
        out.warnings.push_back("underpowered: too few paths for the requested level");
    out.details = {{"kind", "z_selfsim"},
                   {"alpha", p.alpha},
                   {"beta", p.beta},
                   {"p", p.multiplicity},
                   {"hurst", h},
                   {"t0", p.t0},
                   {"scale", p.scale},
                   {"m", p.truncation.active_max_index},
                   {"n_arrivals", p.truncation.n_arrivals},
                   {"epsilon", p.epsilon},
                   {"ks_level", p.ks_level},
                   {"ks_critical", ks_two_sample_critical(p.ks_level,
                                                          static_cast<std::size_t>(p.n_paths),
                                                          static_cast<std::size_t>(p.n_paths))},
                   {"seed", master_seed}};

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "selfsim.csv").string(),
                      {"c", "t0", "H", "ks", "pvalue", "n"});
        csv.row({CsvWriter::num(p.scale), CsvWriter::num(p.t0), CsvWriter::num(h),
                 CsvWriter::num(ks.statistic), CsvWriter::num(ks.p_value),
                 std::to_string(p.n_paths)});
    }
    detail::write_summary_json(opts, "z_selfsim", out);
    return out;
}

// ---------------------------------------------------------------------------
// flow_convergence: MC means of the flow local times L_{n,I,t} along an
// n-grid against the limiting moment.
// ---------------------------------------------------------------------------

struct FlowConvergenceParams {
    double beta = 0.75;
    int multiplicity = 2;
    std::vector<long> n_grid = {1000, 3000, 10000, 30000};
    long replications = 10000;
    double t = 1.0;
    double final_rel_tolerance = 0.20;
    double inversion_sigma = 2.0;  // allowed slack when deviations fail to decrease
};

inline StatSummary run_flow_convergence(const FlowConvergenceParams& p,
                                        std::uint64_t master_seed,
                                        const RunOptions& opts = {}) {
    RenewalChainModel model(p.beta);
    IntegrandSpec f = IntegrandSpec::indicator(p.multiplicity);
    LocalTimeParams params(p.beta, p.multiplicity);
    const double mu_f = product_measure(model, f);
    const double limit = mu_f * std::tgamma(params.index()) *
                         closed_increment_moment(p.beta, p.multiplicity, 1, 0.0, p.t);

    struct Row {
        long n;
        double mean, se, rel;
    };
    std::vector<Row> rows;
    for (std::size_t gi = 0; gi < p.n_grid.size(); ++gi) {
        long n = p.n_grid[gi];
        EntrySampler entry(model, n);
        const double b_n = gamma_pair(p.beta) * entry.wandering_rate();
        std::string tag = "flow-n" + std::to_string(n);
        auto vals = detail::replicate<double>(p.replications, opts.threads, [&](long i) {
            auto rng = make_stream(master_seed, tag, static_cast<std::uint64_t>(i));
            std::vector<std::vector<long>> visits(static_cast<std::size_t>(p.multiplicity));
            for (int j = 0; j < p.multiplicity; ++j)
                visits[static_cast<std::size_t>(j)] =
                    orbit_visits(model, entry.sample(rng), n, rng);
            return flow_local_time_from_visits(visits, n, p.t, f, b_n);
        });
        auto st = summarize(vals);
        rows.push_back({n, st.mean, st.std_error, std::fabs(st.mean - limit) / limit});
    }

    bool pass = rows.back().rel <= p.final_rel_tolerance;
    int hard_inversions = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        double d0 = std::fabs(rows[i].mean - limit);
        double d1 = std::fabs(rows[i + 1].mean - limit);
        if (d1 > d0 + p.inversion_sigma * (rows[i].se + rows[i + 1].se)) ++hard_inversions;
    }
    pass = pass && hard_inversions == 0;

    StatSummary out;
    out.mean = rows.back().mean;
    out.std_error = rows.back().se;
    out.n_samples = p.replications;
    out.pass = pass;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : rows)
        table.push_back({{"n", r.n}, {"estimate", r.mean}, {"std_error", r.se},
                         {"rel_err", r.rel}});
    out.details = {{"kind", "flow_convergence"},
                   {"beta", p.beta},
                   {"p", p.multiplicity},
                   {"t", p.t},
                   {"limit", limit},
                   {"rows", table},
                   {"hard_inversions", hard_inversions},
                   {"final_rel_tolerance", p.final_rel_tolerance},
                   {"seed", master_seed}};
    if (rows.back().se > 0.5 * p.final_rel_tolerance * limit)
        out.warnings.push_back("underpowered: standard error above half the tolerance band");

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "flow.csv").string(),
                      {"n", "estimate", "std_error", "limit", "rel_err"});
        for (const auto& r : rows)
            csv.row({std::to_string(r.n), CsvWriter::num(r.mean), CsvWriter::num(r.se),
                     CsvWriter::num(limit), CsvWriter::num(r.rel)});
    }
    detail::write_summary_json(opts, "flow_convergence", out);
    return out;
}

// ---------------------------------------------------------------------------
// clt_compare: KS distance between normalized partial sums S_n(1) and the
// scaled limit marginal along an n-grid; the distance should shrink with n.
// ---------------------------------------------------------------------------

struct CltCompareParams {
    double alpha = 0.8;
    double beta = 0.75;
    int multiplicity = 2;
    std::vector<long> n_grid = {1000, 10000, 100000};
    long replications = 1000;
    long reference_paths = 2000;
    SeriesTruncation truncation{12, 50};
    double epsilon = 1e-4;
    long bootstrap = 200;
    double decrease_sigma = 2.0;
};

inline StatSummary run_clt_compare(const CltCompareParams& p, std::uint64_t master_seed,
                                   const RunOptions& opts = {}) {
    RenewalChainModel model(p.beta);
    LevyModel levy = LevyModel::sas(p.alpha);
    IntegrandSpec f = IntegrandSpec::indicator(p.multiplicity);
    LocalTimeParams params(p.beta, p.multiplicity);
    const double mu_f = product_measure(model, f);
    const double scale = std::tgamma(params.index()) *
                         std::pow(stable_norm_constant(p.alpha),
                                  -static_cast<double>(p.multiplicity) / p.alpha) *
                         mu_f;

    const std::vector<double> grid = {1.0};
    auto ref = detail::replicate<double>(p.reference_paths, opts.threads, [&](long i) {
        auto rng = make_stream(master_seed, "clt-ref", static_cast<std::uint64_t>(i));
        auto path = sample_multistable_path(p.alpha, p.beta, p.multiplicity, p.truncation,
                                            p.epsilon, grid, rng);
        return scale * path.values[0];
    });

    struct Row {
        long n;
        double ks, pvalue, boot_sd;
    };
    std::vector<Row> rows;
    for (long n : p.n_grid) {
        FlowSeriesContext ctx(model, n);
        std::string tag = "clt-sn" + std::to_string(n);
        auto sn = detail::replicate<double>(p.replications, opts.threads, [&](long i) {
            auto rng = make_stream(master_seed, tag, static_cast<std::uint64_t>(i));
            auto path = sample_partial_sum(ctx, levy, p.truncation, f, grid, rng);
            return path.values[0];
        });
        auto ks = ks_two_sample(sn, ref);
        // bootstrap spread of the KS statistic under resampling of both sides
        double bsd = 0.0;
        if (p.bootstrap > 1) {
            auto boot_rng = make_stream(master_seed, "clt-boot" + std::to_string(n), 0);
            std::vector<double> stats(static_cast<std::size_t>(p.bootstrap));
            std::vector<double> ra(sn.size()), rb(ref.size());
            for (long b = 0; b < p.bootstrap; ++b) {
                for (auto& x : ra) x = sn[boot_rng() % sn.size()];
                for (auto& x : rb) x = ref[boot_rng() % ref.size()];
                stats[static_cast<std::size_t>(b)] = ks_two_sample(ra, rb).statistic;
            }
            bsd = std::sqrt(summarize(stats).variance);
        }
        rows.push_back({n, ks.statistic, ks.p_value, bsd});
    }

    bool pass = true;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        double slack = p.decrease_sigma * std::sqrt(rows[i].boot_sd * rows[i].boot_sd +
                                                    rows[i + 1].boot_sd * rows[i + 1].boot_sd);
        if (!(rows[i + 1].ks < rows[i].ks + slack)) pass = false;
    }

    StatSummary out;
    out.ks_statistic = rows.back().ks;
    out.ks_pvalue = rows.back().pvalue;
    out.n_samples = p.replications;
    out.pass = pass;
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9})
        out.quantiles.emplace_back(q, quantile(ref, q));
    if (p.replications < 200 || p.bootstrap < 20)
        out.warnings.push_back("underpowered: replication or bootstrap count very low");
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : rows)
        table.push_back({{"n", r.n}, {"ks", r.ks}, {"pvalue", r.pvalue},
                         {"boot_sd", r.boot_sd}});
    out.details = {{"kind", "clt_compare"},
                   {"alpha", p.alpha},
                   {"beta", p.beta},
                   {"p", p.multiplicity},
                   {"scale", scale},
                   {"m", p.truncation.active_max_index},
                   {"epsilon", p.epsilon},
                   {"rows", table},
                   {"seed", master_seed}};

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        CsvWriter csv((std::filesystem::path(opts.out_dir) / "clt.csv").string(),
                      {"n", "ks", "pvalue", "boot_sd", "n_samples"});
        for (const auto& r : rows)
            csv.row({std::to_string(r.n), CsvWriter::num(r.ks), CsvWriter::num(r.pvalue),
                     CsvWriter::num(r.boot_sd), std::to_string(p.replications)});
    }
    detail::write_summary_json(opts, "clt_compare", out);
    return out;
}

// --- JSON mapping for the CLI-facing moment types -------------------------

inline nlohmann::json moment_spec_to_json(const MomentSpec& s) {
    return {{"beta", s.beta}, {"p", s.multiplicity}, {"index_sets", s.index_sets},
            {"times", s.times}};
}

inline MomentSpec moment_spec_from_json(const nlohmann::json& j) {
    MomentSpec s;
    s.beta = j.at("beta").get<double>();
    s.multiplicity = j.at("p").get<int>();
    s.index_sets = j.at("index_sets").get<std::vector<std::vector<int>>>();
    s.times = j.at("times").get<std::vector<double>>();
    s.validate();
    return s;
}

inline nlohmann::json moment_estimate_to_json(const MomentEstimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}, {"method", to_string(e.method)}};
}

}  // namespace regenlab

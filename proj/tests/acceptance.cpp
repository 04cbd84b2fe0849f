// Acceptance suite: one quantitative criterion per line, fixed seeds, fixed
// tolerances. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "regenlab/covering.hpp"
#include "regenlab/ergodic.hpp"
#include "regenlab/experiments.hpp"
#include "regenlab/levy.hpp"
#include "regenlab/local_time.hpp"
#include "regenlab/moments.hpp"
#include "regenlab/mstable.hpp"
#include "regenlab/stats.hpp"

using namespace regenlab;

namespace {

constexpr std::uint64_t kSeed = 20240801;

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

bool covering_probability(std::string& detail) {
    CoveringCheckParams p;  // beta 0.6, eps 0.05, x 0.5, N 1e5, 3 binomial SE
    auto s = run_covering_check(p, kSeed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "freq=%.4f target=%.4f z=%.2f", s.mean,
                  s.details["closed_form"].get<double>(), s.details["z"].get<double>());
    detail = buf;
    return s.pass;
}

StatSummary localtime_moments_summary() {
    static bool done = false;
    static StatSummary cached;
    if (!done) {
        LocaltimeMomentsParams p;  // beta 0.75, p 2, eps 1e-4, t 1, 1e4 reps, 5%/10%
        cached = run_localtime_moments(p, kSeed);
        done = true;
    }
    return cached;
}

bool localtime_first_moment(std::string& detail) {
    auto s = localtime_moments_summary();
    auto row = s.details["rows"][0];
    char buf[160];
    std::snprintf(buf, sizeof buf, "mc=%.4f closed=%.4f rel=%.3f (tol 0.05)",
                  row["mc_mean"].get<double>(), row["closed_form"].get<double>(),
                  row["rel_error"].get<double>());
    detail = buf;
    return row["pass"].get<bool>();
}

bool localtime_second_moment(std::string& detail) {
    auto s = localtime_moments_summary();
    auto row = s.details["rows"][1];
    char buf[160];
    std::snprintf(buf, sizeof buf, "mc=%.4f closed=%.4f rel=%.3f (tol 0.10)",
                  row["mc_mean"].get<double>(), row["closed_form"].get<double>(),
                  row["rel_error"].get<double>());
    detail = buf;
    return row["pass"].get<bool>();
}

StatSummary joint_moments_summary() {
    static bool done = false;
    static StatSummary cached;
    if (!done) {
        JointMomentsParams p;  // I1=(1,2), I2=(2,3), t=(1,1), beta 0.75, p 2
        p.psi_outer = 2000;
        cached = run_joint_moments(p, kSeed);
        done = true;
    }
    return cached;
}

bool joint_moment_triangle(std::string& detail) {
    auto s = joint_moments_summary();
    double quad = s.details["quadrature"]["value"].get<double>();
    double qse = s.details["quadrature"]["std_error"].get<double>();
    double mc = s.details["monte_carlo"]["value"].get<double>();
    char buf[200];
    std::snprintf(buf, sizeof buf, "quad=%.5f (rel_se=%.4f) mc=%.5f", quad, qse / quad, mc);
    detail = buf;
    return s.details["triangle_pass"].get<bool>() &&
           s.details["quadrature_precision_pass"].get<bool>();
}

bool psi_consistency(std::string& detail) {
    auto s = joint_moments_summary();
    auto psi = s.details["psi_route"];
    char buf[200];
    std::snprintf(buf, sizeof buf, "shift-averaged=%.5f +- %.5f vs quad=%.5f",
                  psi["value"].get<double>(), psi["std_error"].get<double>(),
                  s.details["quadrature"]["value"].get<double>());
    detail = buf;
    return psi["pass"].get<bool>();
}

bool martingale_refinement(std::string& detail) {
    const double beta = 0.75;
    LocalTimeParams params(beta, 1);
    CoveringConfig cfg{beta, 1e-2, 1.0};
    auto rng = make_stream(kSeed, "acc-mart");
    auto base = sample_covering(cfg, rng);
    double coarse = local_time_eps(base.uncovered, 0.0, 1.0, cfg.epsilon, params);
    const int k = 200;
    std::vector<double> refined(k);
    for (int i = 0; i < k; ++i) {
        auto rng_i = make_stream(kSeed, "acc-mart-refine", static_cast<std::uint64_t>(i));
        auto fine = refine_covering(base, 1e-3, rng_i);
        refined[static_cast<std::size_t>(i)] =
            local_time_eps(fine.uncovered, 0.0, 1.0, 1e-3, params);
    }
    auto st = summarize(refined);
    char buf[160];
    std::snprintf(buf, sizeof buf, "coarse=%.4f refined-mean=%.4f +- %.4f", coarse, st.mean,
                  st.std_error);
    detail = buf;
    return std::fabs(st.mean - coarse) <= 3.0 * st.std_error;
}

bool mittag_leffler_mean(std::string& detail) {
    bool ok = true;
    std::string parts;
    for (double beta : {0.5, 0.75}) {
        auto rng = make_stream(kSeed, "acc-ml", static_cast<std::uint64_t>(beta * 100));
        const int n = 10000;
        std::vector<double> vals(n);
        for (int i = 0; i < n; ++i)
            vals[static_cast<std::size_t>(i)] =
                sample_mittag_leffler(beta, 1.0, 10000, rng).values.back();
        auto st = summarize(vals);
        double target = 1.0 / std::tgamma(1.0 + beta);
        double rel = std::fabs(st.mean - target) / target;
        ok = ok && rel < 0.02;
        char buf[120];
        std::snprintf(buf, sizeof buf, "beta=%.2f rel=%.4f ", beta, rel);
        parts += buf;
    }
    detail = parts + "(tol 0.02)";
    return ok;
}

bool stable_constant_dual(std::string& detail) {
    bool ok = true;
    std::string parts;
    for (double alpha : {0.3, 0.8, 1.5}) {
        double a = stable_norm_constant(alpha);
        double b = stable_norm_constant_quadrature(alpha);
        double rel = std::fabs(a - b) / std::fabs(a);
        ok = ok && rel < 1e-6;
        char buf[120];
        std::snprintf(buf, sizeof buf, "alpha=%.1f rel=%.1e ", alpha, rel);
        parts += buf;
    }
    detail = parts + "(tol 1e-6)";
    return ok;
}

bool z_self_similarity(std::string& detail) {
    ZSelfsimParams p;  // alpha 0.8, beta 0.75, p 2, N 2000, level 0.01
    auto s = run_z_selfsim(p, kSeed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "ks=%.4f pvalue=%.4f critical=%.4f", *s.ks_statistic,
                  *s.ks_pvalue, s.details["ks_critical"].get<double>());
    detail = buf;
    return s.pass;
}

bool renewal_strong_ratio(std::string& detail) {
    RenewalChainModel model(0.75);
    auto u = renewal_sequence(model, 10000);
    double prod = u[10000] * uniform_return_rate(model, 10000);
    double ratio = std::fabs(u[10000] / u[9999] - 1.0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "u_n*b_n=%.4f (tol 0.15 around 1), |u ratio - 1|=%.5f",
                  prod, ratio);
    detail = buf;
    return std::fabs(prod - 1.0) < 0.15 && ratio <= 0.02;
}

bool cn_regular_variation(std::string& detail) {
    RenewalChainModel model(0.75);
    LevyModel levy = LevyModel::sas(0.8);
    const int p = 2;
    std::vector<long> ns;
    for (double e = 3.0; e <= 6.001; e += 0.2)
        ns.push_back(static_cast<long>(std::pow(10.0, e)));
    auto ws = wandering_rates(model, ns);
    std::vector<double> nn(ns.size()), cn(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double b = gamma_pair(model.beta()) * ws[i];
        nn[i] = static_cast<double>(ns[i]);
        cn[i] = nn[i] * std::pow(levy.tail_inverse(1.0 / ws[i]) / b, p);
    }
    double slope = loglog_slope(nn, cn);
    double target = hurst_exponent(0.8, 0.75, p);
    char buf[160];
    std::snprintf(buf, sizeof buf, "slope=%.4f target=%.4f (tol 0.02)", slope, target);
    detail = buf;
    return std::fabs(slope - target) < 0.02;
}

bool flow_moment_convergence(std::string& detail) {
    FlowConvergenceParams p;  // n-grid to 3e4, 1e4 reps, final <= 20%
    auto s = run_flow_convergence(p, kSeed);
    auto rows = s.details["rows"];
    std::string parts;
    for (const auto& r : rows) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "n=%ld rel=%.3f ", r["n"].get<long>(),
                      r["rel_err"].get<double>());
        parts += buf;
    }
    detail = parts + "(final tol 0.20, nonincreasing)";
    return s.pass;
}

bool clt_distributional_trend(std::string& detail) {
    CltCompareParams p;  // n-grid {1e3,1e4,1e5}
    auto s = run_clt_compare(p, kSeed);
    auto rows = s.details["rows"];
    std::string parts;
    for (const auto& r : rows) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "n=%ld ks=%.4f ", r["n"].get<long>(),
                      r["ks"].get<double>());
        parts += buf;
    }
    detail = parts + "(decreasing up to bootstrap error)";
    return s.pass;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "covering probability closed form", covering_probability},
        {2, "local-time first moment", localtime_first_moment},
        {3, "local-time second moment", localtime_second_moment},
        {4, "joint-moment oracle triangle", joint_moment_triangle},
        {5, "conditional-moment consistency", psi_consistency},
        {6, "martingale refinement", martingale_refinement},
        {7, "Mittag-Leffler normalization", mittag_leffler_mean},
        {8, "stable constant dual evaluation", stable_constant_dual},
        {9, "limit-process self-similarity", z_self_similarity},
        {10, "renewal and strong-ratio checks", renewal_strong_ratio},
        {11, "partial-sum normalization regular variation", cn_regular_variation},
        {12, "flow moment convergence", flow_moment_convergence},
        {13, "partial-sum distributional trend", clt_distributional_trend},
    };

    int failed = 0;
    for (auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}

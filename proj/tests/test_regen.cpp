#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "regenlab/covering.hpp"
#include "regenlab/kernels.hpp"
#include "regenlab/local_time.hpp"
#include "regenlab/stats.hpp"

using namespace regenlab;

TEST_CASE("covering point count matches the intensity integral") {
    // mean count = (1-beta) * horizon / epsilon, from integrating the z-marginal
    CoveringConfig cfg{0.6, 0.05, 1.0};
    const double expected = (1.0 - cfg.beta) * cfg.horizon / cfg.epsilon;  // = 8
    auto rng = make_stream(101, "regen-count");
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_covering(cfg, rng).points.size());
    double mean = sum / n;
    // Poisson: sd of the mean = sqrt(lambda/n)
    REQUIRE(std::fabs(mean - expected) <= 4.0 * std::sqrt(expected / n));
}

TEST_CASE("covering validates inputs") {
    auto rng = make_stream(1, "x");
    CoveringConfig zero_eps{0.5, 0.0, 1.0};
    REQUIRE_THROWS_AS(sample_covering(zero_eps, rng), std::invalid_argument);
    CoveringConfig bad_beta{1.2, 0.1, 1.0};
    REQUIRE_THROWS_AS(sample_covering(bad_beta, rng), std::invalid_argument);
}

TEST_CASE("near beta=1 the covering intensity vanishes") {
    CoveringConfig cfg{0.999999, 0.1, 1.0};
    auto rng = make_stream(3, "regen-deg");
    auto s = sample_covering(cfg, rng);
    // intensity ~ 1e-5, so with overwhelming probability nothing is covered
    REQUIRE(s.uncovered == IntervalSet::full(1.0));
}

TEST_CASE("single-point coverage probability matches the closed form") {
    // P(x uncovered) = (e/eps)^{beta-1} x^{beta-1} for x > eps
    CoveringConfig cfg{0.6, 0.05, 1.0};
    const double x = 0.5;
    const double target = std::pow(std::exp(1.0) / cfg.epsilon, cfg.beta - 1.0) *
                          std::pow(x, cfg.beta - 1.0);
    auto rng = make_stream(107, "regen-cover-x");
    const int n = 20000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (sample_covering(cfg, rng).uncovered.contains(x)) ++hits;
    double freq = static_cast<double>(hits) / n;
    REQUIRE(std::fabs(freq - target) <= 3.0 * std::sqrt(target * (1.0 - target) / n));
}

TEST_CASE("pair coverage probability uses the smoothed pair kernel") {
    CoveringConfig cfg{0.7, 0.05, 1.0};
    const double x1 = 0.3, x2 = 0.52;
    const double target = std::pow(std::exp(1.0) / cfg.epsilon, 2.0 * (cfg.beta - 1.0)) *
                          anchored_gap_kernel_smoothed(cfg.beta, cfg.epsilon, {x1, x2});
    auto rng = make_stream(109, "regen-cover-xx");
    const int n = 40000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        auto s = sample_covering(cfg, rng);
        if (s.uncovered.contains(x1) && s.uncovered.contains(x2)) ++hits;
    }
    double freq = static_cast<double>(hits) / n;
    REQUIRE(std::fabs(freq - target) <= 3.5 * std::sqrt(target * (1.0 - target) / n));
}

TEST_CASE("refinement nests exactly and adds the layer intensity") {
    CoveringConfig cfg{0.75, 1e-2, 1.0};
    auto rng = make_stream(113, "regen-refine");
    auto base = sample_covering(cfg, rng);
    REQUIRE_THROWS_AS(refine_covering(base, 1e-2, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(refine_covering(base, 2e-2, rng), std::invalid_argument);

    double expected_added = (1.0 - cfg.beta) * cfg.horizon * (1.0 / 1e-3 - 1.0 / 1e-2);
    const int n = 400;
    double total_added = 0.0;
    for (int i = 0; i < n; ++i) {
        auto fine = refine_covering(base, 1e-3, rng);
        REQUIRE(fine.config.epsilon == 1e-3);
        total_added += static_cast<double>(fine.points.size() - base.points.size());
        // nesting: fine uncovered subset of base uncovered, exactly
        REQUIRE(intersect(fine.uncovered, base.uncovered) == fine.uncovered);
    }
    double mean_added = total_added / n;
    REQUIRE(std::fabs(mean_added - expected_added) <= 4.0 * std::sqrt(expected_added / n));
}

TEST_CASE("stationary shift law") {
    const double beta = 0.5;
    auto rng = make_stream(127, "regen-shift");
    // inverse CDF check: V = U^{1/(1-beta)}
    REQUIRE(std::pow(0.25, 1.0 / (1.0 - beta)) == Catch::Approx(0.0625));
    REQUIRE(std::pow(1.0, 1.0 / (1.0 - beta)) == 1.0);
    std::vector<double> draws(100000);
    for (auto& d : draws) {
        d = sample_stationary_shift(beta, rng);
        REQUIRE(d > 0.0);
        REQUIRE(d < 1.0);
    }
    auto ks = ks_one_sample(draws, [&](double v) { return std::pow(v, 1.0 - beta); });
    REQUIRE(ks.p_value > 0.001);
}

TEST_CASE("intersect_shifted") {
    CoveringConfig cfg{0.75, 1e-2, 1.0};
    auto rng = make_stream(131, "regen-fam");
    auto s = sample_covering(cfg, rng);

    // p = 1: returns the single shifted set
    std::vector<ShiftedCovering> one{{s, 0.25}};
    REQUIRE(intersect_shifted(one) == s.uncovered.shift(0.25));

    // shifts at or beyond the horizon empty the window
    std::vector<ShiftedCovering> far{{s, 1.0}, {sample_covering(cfg, rng), 1.0}};
    REQUIRE(intersect_shifted(far).is_empty());

    CoveringConfig other{0.75, 1e-2, 2.0};
    std::vector<ShiftedCovering> bad{{s, 0.0}, {sample_covering(other, rng), 0.0}};
    REQUIRE_THROWS_AS(intersect_shifted(bad), std::invalid_argument);
}

TEST_CASE("shifted covering occupation is stationary across subwindows") {
    // with the stationary shift, E lambda((R+V) ∩ [a, a+delta]) is flat in a
    CoveringConfig cfg{0.6, 1e-3, 1.0};
    auto rng = make_stream(137, "regen-stationary");
    const double delta = 0.2;
    const std::vector<double> starts = {0.1, 0.4, 0.7};
    const int n = 20000;
    std::vector<std::vector<double>> occ(starts.size());
    for (int i = 0; i < n; ++i) {
        double v = sample_stationary_shift(cfg.beta, rng);
        auto shifted = sample_covering(cfg, rng).uncovered.shift(v);
        for (std::size_t a = 0; a < starts.size(); ++a)
            occ[a].push_back(shifted.measure_upto(starts[a] + delta) -
                             shifted.measure_upto(starts[a]));
    }
    for (std::size_t a = 1; a < starts.size(); ++a) {
        auto s0 = summarize(occ[0]);
        auto sa = summarize(occ[a]);
        double z = (sa.mean - s0.mean) /
                   std::sqrt(sa.std_error * sa.std_error + s0.std_error * s0.std_error);
        REQUIRE(std::fabs(z) <= 4.0);
    }
}

TEST_CASE("subordinator increments have the right Laplace transform") {
    // E exp(-lambda sigma_dt) = exp(-dt lambda^beta); strong oracle for the
    // Kanter sampler feeding both the range backend and the Mittag-Leffler paths
    const double beta = 0.7, dt = 0.5;
    auto rng = make_stream(139, "regen-kanter");
    const int n = 200000;
    for (double lambda : {0.5, 1.0, 3.0}) {
        std::vector<double> vals(n);
        for (int i = 0; i < n; ++i)
            vals[static_cast<std::size_t>(i)] =
                std::exp(-lambda * stable_subordinator_increment(beta, dt, rng));
        auto st = summarize(vals);
        double target = std::exp(-dt * std::pow(lambda, beta));
        REQUIRE(std::fabs(st.mean - target) <= 4.0 * st.std_error);
    }
}

TEST_CASE("subordinator range cross-validates the covering scheme") {
    // Kingman's dilation estimator applied to the range should reproduce the
    // Mittag-Leffler mean 1/Gamma(1+beta) at t = 1.
    const double beta = 0.5;
    LocalTimeParams params(beta, 1);
    auto rng = make_stream(149, "regen-range");
    const int n = 3000;
    std::vector<double> lt(n);
    for (int i = 0; i < n; ++i) {
        auto range = sample_subordinator_range(beta, 1.0, 4000, rng);
        lt[static_cast<std::size_t>(i)] = kingman_estimate(range, 1.0, 1000, params);
    }
    auto st = summarize(lt);
    double target = 1.0 / std::tgamma(1.0 + beta);
    // dilation at finite n carries a visible bias; ask for 5% agreement
    REQUIRE(std::fabs(st.mean - target) / target < 0.05);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "regenlab/interval_set.hpp"
#include "regenlab/rng.hpp"

using namespace regenlab;

namespace {

IntervalSet random_set(RngStream& rng, double window, int max_pieces) {
    std::vector<Interval> raw;
    int n = static_cast<int>(rng() % static_cast<unsigned>(max_pieces + 1));
    for (int i = 0; i < n; ++i) {
        double a = uniform(rng, 0.0, window);
        double b = uniform(rng, 0.0, window);
        if (a > b) std::swap(a, b);
        raw.push_back({a, b});
    }
    return canonicalize(raw, window);
}

}  // namespace

TEST_CASE("canonicalize merges, clips and validates") {
    auto s = canonicalize({{0.0, 1.0}, {0.5, 2.0}}, 3.0);
    REQUIRE(s.intervals() == std::vector<Interval>{{0.0, 2.0}});

    auto e = canonicalize({}, 1.0);
    REQUIRE(e.is_empty());

    auto c = canonicalize({{0.0, 0.5}}, 0.3);
    REQUIRE(c.intervals() == std::vector<Interval>{{0.0, 0.3}});

    // touching intervals merge (closed sets)
    auto t = canonicalize({{0.0, 0.5}, {0.5, 1.0}}, 1.0);
    REQUIRE(t.size() == 1);

    REQUIRE_THROWS_AS(canonicalize({{-0.1, 0.5}}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(canonicalize({{0.7, 0.5}}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(canonicalize({}, 0.0), std::invalid_argument);
}

TEST_CASE("complement within the window") {
    auto s = canonicalize({{0.2, 0.5}}, 1.0);
    REQUIRE(s.complement().intervals() == std::vector<Interval>{{0.0, 0.2}, {0.5, 1.0}});
    REQUIRE(IntervalSet::empty(1.0).complement() == IntervalSet::full(1.0));
    REQUIRE(IntervalSet::full(1.0).complement().is_empty());
}

TEST_CASE("complement is an involution up to measure zero") {
    auto rng = make_stream(7, "ivl-complement");
    for (int rep = 0; rep < 200; ++rep) {
        auto s = random_set(rng, 2.0, 6);
        auto cc = s.complement().complement();
        // symmetric difference has measure zero
        double m1 = intersect(s, cc.complement()).total_measure();
        double m2 = intersect(cc, s.complement()).total_measure();
        REQUIRE(m1 + m2 < 1e-12);
    }
}

TEST_CASE("intersection basics") {
    auto a = canonicalize({{0.0, 1.0}}, 2.0);
    auto b = canonicalize({{0.5, 2.0}}, 2.0);
    REQUIRE(intersect(a, b).intervals() == std::vector<Interval>{{0.5, 1.0}});

    REQUIRE(intersect(a, IntervalSet::empty(2.0)).is_empty());
    REQUIRE(intersect(a, a) == a);

    auto w = canonicalize({{0.0, 1.0}}, 1.0);
    REQUIRE_THROWS_AS(intersect(a, w), std::invalid_argument);
    REQUIRE_THROWS_AS(intersect_many({}), std::invalid_argument);
}

TEST_CASE("intersect_many is permutation invariant") {
    auto rng = make_stream(11, "ivl-perm");
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<IntervalSet> sets{random_set(rng, 1.0, 5), random_set(rng, 1.0, 5),
                                      random_set(rng, 1.0, 5)};
        auto ref = intersect_many(sets);
        std::vector<IntervalSet> perm{sets[2], sets[0], sets[1]};
        REQUIRE(intersect_many(perm) == ref);
        std::vector<IntervalSet> rev{sets[2], sets[1], sets[0]};
        REQUIRE(intersect_many(rev) == ref);
    }
}

TEST_CASE("measure_upto") {
    auto s = canonicalize({{0.0, 0.3}, {0.5, 0.6}}, 1.0);
    REQUIRE(s.measure_upto(1.0) == Catch::Approx(0.4));
    REQUIRE(s.measure_upto(0.55) == Catch::Approx(0.35));
    REQUIRE(s.measure_upto(0.0) == 0.0);
    REQUIRE_THROWS_AS(s.measure_upto(1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(s.measure_upto(-0.1), std::invalid_argument);
}

TEST_CASE("measure partition and Lipschitz properties") {
    auto rng = make_stream(13, "ivl-measure");
    for (int rep = 0; rep < 200; ++rep) {
        auto s = random_set(rng, 1.0, 6);
        auto c = s.complement();
        double t = uniform(rng, 0.0, 1.0);
        REQUIRE(s.measure_upto(t) + c.measure_upto(t) ==
                Catch::Approx(t).margin(1e-12 * (1.0 + s.size() + c.size())));
        // nondecreasing and 1-Lipschitz in t
        double t2 = uniform(rng, 0.0, 1.0);
        double lo = std::min(t, t2), hi = std::max(t, t2);
        double d = s.measure_upto(hi) - s.measure_upto(lo);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= hi - lo + 1e-15);
    }
}

TEST_CASE("measures_upto matches pointwise evaluation") {
    auto rng = make_stream(17, "ivl-grid");
    auto s = random_set(rng, 1.0, 8);
    std::vector<double> grid = {0.0, 0.1, 0.25, 0.5, 0.51, 0.52, 0.9, 1.0};
    auto vals = s.measures_upto(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        REQUIRE(vals[i] == Catch::Approx(s.measure_upto(grid[i])).margin(1e-14));
}

TEST_CASE("shift translates and clips") {
    auto s = canonicalize({{0.0, 1.0}}, 1.0);
    REQUIRE(s.shift(0.5).intervals() == std::vector<Interval>{{0.5, 1.0}});
    REQUIRE(s.shift(1.5).is_empty());
    REQUIRE_THROWS_AS(s.shift(-0.1), std::invalid_argument);
}

TEST_CASE("dilate grows each piece by at most the radius") {
    auto rng = make_stream(19, "ivl-dilate");
    for (int rep = 0; rep < 100; ++rep) {
        auto s = random_set(rng, 1.0, 6);
        double r = 0.01;
        auto d = s.dilate(r);
        REQUIRE(d.total_measure() <= s.total_measure() + static_cast<double>(s.size()) * r + 1e-15);
        REQUIRE(d.total_measure() >= s.total_measure());
        // containment
        REQUIRE(intersect(s, d) == s);
    }
}

TEST_CASE("contains") {
    auto s = canonicalize({{0.2, 0.4}, {0.6, 0.6}}, 1.0);
    REQUIRE(s.contains(0.2));
    REQUIRE(s.contains(0.3));
    REQUIRE(s.contains(0.4));
    REQUIRE(s.contains(0.6));
    REQUIRE_FALSE(s.contains(0.5));
    REQUIRE_FALSE(s.contains(0.0));
}

TEST_CASE("intersection agrees with pointwise membership") {
    auto rng = make_stream(23, "ivl-member");
    for (int rep = 0; rep < 200; ++rep) {
        auto a = random_set(rng, 1.0, 5);
        auto b = random_set(rng, 1.0, 5);
        auto both = intersect(a, b);
        for (int k = 0; k < 20; ++k) {
            double x = uniform(rng, 0.0, 1.0);
            REQUIRE(both.contains(x) == (a.contains(x) && b.contains(x)));
        }
    }
}

TEST_CASE("canonicalize is idempotent and restrict_upto matches measure_upto") {
    auto rng = make_stream(29, "ivl-idem");
    for (int rep = 0; rep < 200; ++rep) {
        auto s = random_set(rng, 1.0, 6);
        REQUIRE(canonicalize(s.intervals(), s.window_hi()) == s);
        double t = uniform(rng, 0.0, 1.0);
        REQUIRE(s.restrict_upto(t).total_measure() ==
                Catch::Approx(s.measure_upto(t)).margin(1e-15));
    }
}

TEST_CASE("json debug serialization") {
    auto s = canonicalize({{0.0, 0.5}}, 1.0);
    REQUIRE(s.to_json() == "[[0,0.5]]");
    REQUIRE(IntervalSet::empty(1.0).to_json() == "[]");
}

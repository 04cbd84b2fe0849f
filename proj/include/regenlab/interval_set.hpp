// Exact algebra on finite unions of disjoint closed intervals inside a bounded
// window [0, window_hi]. All regenerative-set computations reduce to this.
//
// Canonical form: intervals sorted by left endpoint, pairwise disjoint, with
// strictly positive gaps between them (touching intervals merge), all inside
// the window. Endpoints are kept in double precision with exact comparisons;
// no tolerance snapping, since Poisson samples are generic.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace regenlab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

class IntervalSet {
  public:
    explicit IntervalSet(double window_hi) : window_hi_(check_window(window_hi)) {}

    static IntervalSet empty(double window_hi) { return IntervalSet(window_hi); }

    static IntervalSet full(double window_hi) {
        IntervalSet s(window_hi);
        s.intervals_.push_back({0.0, window_hi});
        return s;
    }

    double window_hi() const { return window_hi_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    bool is_empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }
    bool operator==(const IntervalSet&) const = default;

    double total_measure() const {
        double m = 0.0;
        for (const auto& iv : intervals_) m += iv.length();
        return m;
    }

    bool contains(double x) const {
        auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                                   [](double v, const Interval& iv) { return v < iv.lo; });
        if (it == intervals_.begin()) return false;
        --it;
        return x >= it->lo && x <= it->hi;
    }

    // Lebesgue measure of the set intersected with [0, t], exactly summed.
    double measure_upto(double t) const {
        if (t < 0.0 || t > window_hi_)
            throw std::invalid_argument("measure_upto: t outside [0, window_hi]");
        double m = 0.0;
        for (const auto& iv : intervals_) {
            if (iv.lo >= t) break;
            m += std::min(iv.hi, t) - iv.lo;
        }
        return m;
    }

    // measure_upto evaluated on a sorted ascending grid in one sweep.
    std::vector<double> measures_upto(std::span<const double> grid) const {
        std::vector<double> out(grid.size(), 0.0);
        double acc = 0.0;
        std::size_t k = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double t = grid[g];
            if (t < 0.0 || t > window_hi_)
                throw std::invalid_argument("measures_upto: grid point outside window");
            if (g > 0 && grid[g] < grid[g - 1])
                throw std::invalid_argument("measures_upto: grid not ascending");
            while (k < intervals_.size() && intervals_[k].hi <= t) {
                acc += intervals_[k].length();
                ++k;
            }
            double partial = 0.0;
            if (k < intervals_.size() && intervals_[k].lo < t) partial = t - intervals_[k].lo;
            out[g] = acc + partial;
        }
        return out;
    }

    // Complement within [0, window_hi]; the closure of the set difference.
    IntervalSet complement() const {
        IntervalSet out(window_hi_);
        double prev = 0.0;
        for (const auto& iv : intervals_) {
            if (iv.lo > prev) out.append_merge({prev, iv.lo});
            prev = iv.hi;
        }
        if (prev < window_hi_) out.append_merge({prev, window_hi_});
        return out;
    }

    // Translate by v >= 0, then clip to the window. Pieces that clip down to
    // the bare boundary point {window_hi} are dropped.
    IntervalSet shift(double v) const {
        if (v < 0.0) throw std::invalid_argument("shift: negative shift");
        IntervalSet out(window_hi_);
        for (const auto& iv : intervals_) {
            double lo = iv.lo + v;
            if (lo >= window_hi_) break;
            out.intervals_.push_back({lo, std::min(iv.hi + v, window_hi_)});
        }
        return out;
    }

    // Minkowski sum with [-r/2, r/2], clipped to [0, window_hi], re-merged.
    IntervalSet dilate(double r) const {
        if (r < 0.0) throw std::invalid_argument("dilate: negative radius");
        IntervalSet out(window_hi_);
        for (const auto& iv : intervals_) {
            double lo = std::max(0.0, iv.lo - r / 2.0);
            double hi = std::min(window_hi_, iv.hi + r / 2.0);
            if (lo > window_hi_ || hi < 0.0) continue;
            out.append_merge({lo, hi});
        }
        return out;
    }

    // Intersection with [0, t], window preserved.
    IntervalSet restrict_upto(double t) const {
        if (t < 0.0 || t > window_hi_)
            throw std::invalid_argument("restrict_upto: t outside [0, window_hi]");
        IntervalSet out(window_hi_);
        for (const auto& iv : intervals_) {
            if (iv.lo > t) break;
            out.intervals_.push_back({iv.lo, std::min(iv.hi, t)});
        }
        return out;
    }

    // Debug serialization as a JSON array of [lo, hi] pairs.
    std::string to_json() const {
        std::string s = "[";
        char buf[64];
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            if (i) s += ",";
            std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", intervals_[i].lo, intervals_[i].hi);
            s += buf;
        }
        s += "]";
        return s;
    }

    friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
        if (a.window_hi_ != b.window_hi_)
            throw std::invalid_argument("intersect: mismatched windows");
        IntervalSet out(a.window_hi_);
        std::size_t i = 0, j = 0;
        while (i < a.intervals_.size() && j < b.intervals_.size()) {
            double lo = std::max(a.intervals_[i].lo, b.intervals_[j].lo);
            double hi = std::min(a.intervals_[i].hi, b.intervals_[j].hi);
            if (lo <= hi) out.intervals_.push_back({lo, hi});
            if (a.intervals_[i].hi < b.intervals_[j].hi) {
                ++i;
            } else if (a.intervals_[i].hi > b.intervals_[j].hi) {
                ++j;
            } else {
                ++i;
                ++j;
            }
        }
        return out;
    }

    friend IntervalSet canonicalize(std::vector<Interval> raw, double window_hi);

  private:
    static double check_window(double w) {
        if (!(w > 0.0)) throw std::invalid_argument("IntervalSet: window_hi must be positive");
        return w;
    }

    // push assuming nondecreasing lo; merges with the current tail when touching.
    void append_merge(Interval iv) {
        if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }

    double window_hi_ = 0.0;
    std::vector<Interval> intervals_;
};

// Sort, merge touching/overlapping intervals, clip to [0, window_hi].
// Negative coordinates and inverted intervals are rejected.
inline IntervalSet canonicalize(std::vector<Interval> raw, double window_hi) {
    IntervalSet out(window_hi);
    for (const auto& iv : raw) {
        if (iv.lo < 0.0 || iv.hi < 0.0)
            throw std::invalid_argument("canonicalize: negative coordinate");
        if (iv.lo > iv.hi) throw std::invalid_argument("canonicalize: lo > hi");
    }
    std::sort(raw.begin(), raw.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : raw) {
        if (iv.lo > window_hi) continue;
        out.append_merge({iv.lo, std::min(iv.hi, window_hi)});
    }
    return out;
}

inline IntervalSet intersect_many(std::span<const IntervalSet> sets) {
    if (sets.empty()) throw std::invalid_argument("intersect_many: no sets");
    IntervalSet acc = sets.front();
    for (std::size_t i = 1; i < sets.size(); ++i) acc = intersect(acc, sets[i]);
    return acc;
}

}  // namespace regenlab

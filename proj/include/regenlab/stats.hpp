// Statistics helpers shared by tests and experiment runners: sample summaries,
// two-sample Kolmogorov-Smirnov, chi-square, and log-log regression slopes.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace regenlab {

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;   // unbiased
    double std_error = 0.0;  // of the mean
    std::size_t n = 0;
};

inline SampleStats summarize(std::span<const double> xs) {
    SampleStats s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(s.n - 1);
        s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
    }
    return s;
}

// q-quantile with linear interpolation; input need not be sorted.
inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(xs.begin(), xs.end());
    double pos = q * static_cast<double>(xs.size() - 1);
    auto idx = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(idx);
    if (idx + 1 < xs.size()) return xs[idx] * (1.0 - frac) + xs[idx + 1] * frac;
    return xs.back();
}

// Tail of the Kolmogorov distribution, Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_tail(d * std::sqrt(na * nb / (na + nb)));
    return r;
}

// One-sample KS against an analytic CDF.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> xs, Cdf cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_tail(d * std::sqrt(n));
    return r;
}

// Critical value for the two-sample statistic at significance alpha.
inline double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
    double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

inline double chi2_statistic(std::span<const double> observed,
                             std::span<const double> expected) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi2_statistic: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) throw std::invalid_argument("chi2_statistic: nonpositive expected count");
        double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

// Upper critical value via the Wilson-Hilferty cube approximation.
inline double chi2_critical(double dof, double alpha) {
    // inverse normal tail by Acklam-style rational approximation on the upper tail
    auto inv_norm_upper = [](double a) {
        // returns z with P(Z > z) = a, 0 < a < 0.5
        double t = std::sqrt(-2.0 * std::log(a));
        return t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t);
    };
    double z = inv_norm_upper(alpha);
    double h = 2.0 / (9.0 * dof);
    double c = dof * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
    return c;
}

inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols_slope: need matching samples of size >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw std::invalid_argument("loglog_slope: nonpositive input");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return ols_slope(lx, ly);
}

}  // namespace regenlab

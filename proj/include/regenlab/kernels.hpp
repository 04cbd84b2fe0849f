// Gap-product kernels entering the moment formulas for local times of
// intersections of stable regenerative sets. All kernels are symmetric
// functions of their arguments (inputs are sorted internally) and are products
// of power singularities (x_(j) - x_(j-1))^{beta-1} over consecutive gaps:
//
//   stationary (q>=1):  Gamma(beta)Gamma(2-beta) * prod_{j=2..q} gap_j^{beta-1}
//   anchored   (q>=1):  prod_{j=1..q} gap_j^{beta-1} with x_(0) := 0
//
// and their epsilon-smoothed versions in which each gap power is replaced by
// the covering-scheme weight
//   f_eps(y) = (e^{y/eps-1} eps)^{beta-1}  for y <= eps,   y^{beta-1} for y > eps.
// Diagonal inputs are a singular-input error, not a convention: evaluation on a
// measure-zero set would only hide sampler bugs.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace regenlab {

enum class KernelKind {
    stationary,          // h_q
    anchored,            // g_q
    anchored_smoothed,   // g_{q,eps}
    smoothed_gap,        // f_eps, univariate
};

inline double gamma_pair(double beta) {
    return std::tgamma(beta) * std::tgamma(2.0 - beta);
}

// Smoothed gap weight f_eps; continuous at y = eps where both branches give
// eps^{beta-1}.
inline double smoothed_gap_weight(double beta, double epsilon, double y) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("smoothed_gap_weight: epsilon <= 0");
    if (!(y > 0.0)) throw std::domain_error("smoothed_gap_weight: singular input y <= 0");
    if (y <= epsilon)
        return std::exp((beta - 1.0) * (y / epsilon - 1.0 + std::log(epsilon)));
    return std::pow(y, beta - 1.0);
}

namespace detail {

inline std::vector<double> sorted_off_diagonal(std::vector<double> x, bool anchored) {
    std::sort(x.begin(), x.end());
    if (anchored && !x.empty() && x.front() <= 0.0)
        throw std::domain_error("kernel: singular input (coordinate <= anchor 0)");
    for (std::size_t j = 1; j < x.size(); ++j)
        if (x[j] == x[j - 1]) throw std::domain_error("kernel: singular input (diagonal)");
    return x;
}

}  // namespace detail

inline double stationary_gap_kernel(double beta, std::vector<double> x) {
    if (x.empty()) return 1.0;
    auto s = detail::sorted_off_diagonal(std::move(x), /*anchored=*/false);
    double v = gamma_pair(beta);
    for (std::size_t j = 1; j < s.size(); ++j) v *= std::pow(s[j] - s[j - 1], beta - 1.0);
    return v;
}

inline double anchored_gap_kernel(double beta, std::vector<double> x) {
    if (x.empty()) return 1.0;
    auto s = detail::sorted_off_diagonal(std::move(x), /*anchored=*/true);
    double v = std::pow(s[0], beta - 1.0);
    for (std::size_t j = 1; j < s.size(); ++j) v *= std::pow(s[j] - s[j - 1], beta - 1.0);
    return v;
}

inline double anchored_gap_kernel_smoothed(double beta, double epsilon,
                                           std::vector<double> x) {
    if (x.empty()) return 1.0;
    auto s = detail::sorted_off_diagonal(std::move(x), /*anchored=*/true);
    double v = smoothed_gap_weight(beta, epsilon, s[0]);
    for (std::size_t j = 1; j < s.size(); ++j)
        v *= smoothed_gap_weight(beta, epsilon, s[j] - s[j - 1]);
    return v;
}

inline double kernel_eval(KernelKind kind, double beta, std::optional<double> epsilon,
                          std::vector<double> x) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("kernel_eval: beta outside (0,1)");
    switch (kind) {
        case KernelKind::stationary:
            return stationary_gap_kernel(beta, std::move(x));
        case KernelKind::anchored:
            return anchored_gap_kernel(beta, std::move(x));
        case KernelKind::anchored_smoothed:
            if (!epsilon) throw std::invalid_argument("kernel_eval: epsilon required");
            return anchored_gap_kernel_smoothed(beta, *epsilon, std::move(x));
        case KernelKind::smoothed_gap:
            if (!epsilon) throw std::invalid_argument("kernel_eval: epsilon required");
            if (x.size() != 1)
                throw std::invalid_argument("kernel_eval: smoothed_gap takes one coordinate");
            return smoothed_gap_weight(beta, *epsilon, x[0]);
    }
    throw std::logic_error("kernel_eval: unknown kind");
}

}  // namespace regenlab

#ifndef SHARPK_TAIL_HPP
#define SHARPK_TAIL_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "sharpk/errors.hpp"
#include "sharpk/kernel.hpp"

namespace sharpk {

struct TailBoundInputs {
    int d = 3;
    double nu = 0.0;
    double rho = 0.0;
};

namespace detail {

inline double binomial(int n, int k)
{
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(r);
}

} // namespace detail

/// Upper bound on sum_{h in Z^d, |h| >= rho} |h|^-nu:
///   (2 pi^(d/2) / Gamma(d/2)) sum_{i<d} binom(d-1,i) d^((d-1-i)/2) / ((nu-1-i)(rho - 2 sqrt d)^(nu-1-i)).
inline double tail_sum_bound(const TailBoundInputs& in)
{
    const int d = in.d;
    detail::require(d >= 1, "tail_sum_bound: dimension must be positive");
    detail::require(in.nu > d, "tail_sum_bound: requires nu > d (nu = " + std::to_string(in.nu) + ")");
    const double gap = in.rho - 2.0 * std::sqrt(static_cast<double>(d));
    detail::require(gap > 0.0, "tail_sum_bound: requires rho > 2 sqrt(d)");

    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        const double e = in.nu - 1.0 - i;
        detail::require(e > 0.0, "tail_sum_bound: requires nu - 1 - i > 0 for all i < d");
        sum += detail::binomial(d - 1, i) * std::pow(static_cast<double>(d), (d - 1 - i) / 2.0) /
               (e * std::pow(gap, e));
    }
    return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0) * sum;
}

/// Uniform bound on the far-region part of the lattice sum:
/// 2 B_n tail_sum_bound(d, 2n, rho), with B_n the wedge-power constant.
inline double delta_K(int d, double n, double rho)
{
    detail::require(d >= 2, "delta_K: dimension must be at least 2");
    detail::require(2.0 * n > d, "delta_K: requires n > d/2");
    return 2.0 * wedge_power_constant(n) * tail_sum_bound({d, 2.0 * n, rho});
}

} // namespace sharpk

#endif // SHARPK_TAIL_HPP

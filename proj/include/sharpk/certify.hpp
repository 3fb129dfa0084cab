#ifndef SHARPK_CERTIFY_HPP
#define SHARPK_CERTIFY_HPP

// Certified bounds K+ and K- on the sharp constant: exhaustive search of the
// near-region sum over canonical lattice vectors, domination of the outer
// region by the large-|k| expansion, and the closing tail bound.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sharpk/errors.hpp"
#include "sharpk/kernel.hpp"
#include "sharpk/lattice.hpp"
#include "sharpk/parallel.hpp"
#include "sharpk/sums.hpp"
#include "sharpk/tail.hpp"

namespace sharpk {

/// Enclosures of min and max of Q_{n,l} over the sphere.
struct ExpansionTerm {
    int ell = 0;
    Interval q_min;
    Interval Q_max;
    std::vector<double> argmax;
};

/// Coefficients of the two-sided expansion of K_m for |k| >= 2 rho:
///   Z + sum q_l |k|^-l + v |k|^-t <= K_m(k) <= Z + sum Q_l |k|^-l + V |k|^-t.
/// Stored coefficients are already rounded outward.
struct AsymptoticModel {
    int d = 0;
    double n = 0.0;
    double rho = 0.0;
    int t = 0;
    double Z_lower = 0.0;
    double Z_upper = 0.0;
    std::vector<ExpansionTerm> terms; ///< l = 2, 4, ..., t-2
    double v = 0.0;
    double V = 0.0;
    RemainderExtrema remainder;

    /// Upper coefficient of |k|^-l, from the upper enclosure of max Q_{n,l}.
    [[nodiscard]] double Q(int ell) const
    {
        for (const auto& term : terms) {
            if (term.ell == ell) {
                return term.Q_max.upper;
            }
        }
        throw precondition_error("AsymptoticModel: no term with l = " + std::to_string(ell));
    }
    [[nodiscard]] double q(int ell) const
    {
        for (const auto& term : terms) {
            if (term.ell == ell) {
                return term.q_min.lower;
            }
        }
        throw precondition_error("AsymptoticModel: no term with l = " + std::to_string(ell));
    }
};

struct ModelOptions {
    RemainderExtremaOptions remainder{};
    SphereExtremaOptions sphere{};
};

namespace detail {

// Relative outward widening of coefficients that come out of rounded sums.
inline constexpr double kCoefficientSlack = 1e-12;

inline double widen_up(double x) { return x + kCoefficientSlack * std::fabs(x); }
inline double widen_down(double x) { return x - kCoefficientSlack * std::fabs(x); }

} // namespace detail

inline AsymptoticModel build_asymptotic_model(const SumConfig& cfg, int t, const ModelOptions& opt = {})
{
    detail::require(t >= 2 && t % 2 == 0, "asymptotic model: t must be even and >= 2");
    AsymptoticModel m;
    m.d = cfg.d();
    m.n = cfg.n();
    m.rho = cfg.rho();
    m.t = t;
    const double z = Z_n(cfg);
    m.Z_lower = detail::widen_down(z);
    m.Z_upper = detail::widen_up(z);
    for (int ell = 2; ell < t; ell += 2) {
        const SphereExtrema e = extremize_Q(build_Q(cfg, ell), opt.sphere);
        m.terms.push_back({ell, Interval{detail::widen_down(e.min.lower), e.min.upper},
                           Interval{e.max.lower, detail::widen_up(e.max.upper)}, e.argmax});
    }
    m.remainder = remainder_extrema(cfg.n(), t, opt.remainder);
    const auto [v, V] = vV_nt(cfg, t, m.remainder);
    m.v = detail::widen_down(v);
    m.V = detail::widen_up(V);
    return m;
}

/// Upper model Z + sum Q_l k^-l + max(V, 0) k^-t at |k| = k_norm >= 2 rho.
inline double asymptotic_upper(const AsymptoticModel& m, double k_norm)
{
    detail::require(k_norm >= 2.0 * m.rho, "asymptotic_upper: requires |k| >= 2 rho");
    double s = m.Z_upper;
    for (const auto& term : m.terms) {
        s += term.Q_max.upper * std::pow(k_norm, -term.ell);
    }
    return s + std::max(m.V, 0.0) * std::pow(k_norm, -m.t);
}

/// Lower model Z + sum q_l k^-l + v k^-t at |k| = k_norm >= 2 rho.
inline double asymptotic_lower(const AsymptoticModel& m, double k_norm)
{
    detail::require(k_norm >= 2.0 * m.rho, "asymptotic_lower: requires |k| >= 2 rho");
    double s = m.Z_lower;
    for (const auto& term : m.terms) {
        s += term.q_min.lower * std::pow(k_norm, -term.ell);
    }
    return s + m.v * std::pow(k_norm, -m.t);
}

/// Supremum of the upper model over [k_norm, inf).  Every term is bounded by
/// its positive part, which is nonincreasing in |k|, so the majorant at
/// k_norm bounds the whole ray.
inline double asymptotic_upper_sup(const AsymptoticModel& m, double k_norm)
{
    detail::require(k_norm >= 2.0 * m.rho, "asymptotic_upper_sup: requires |k| >= 2 rho");
    double s = m.Z_upper;
    for (const auto& term : m.terms) {
        s += std::max(term.Q_max.upper, 0.0) * std::pow(k_norm, -term.ell);
    }
    s += std::max(m.V, 0.0) * std::pow(k_norm, -m.t);
    return detail::widen_up(s);
}

/// Extremes of K_m over the shell s <= |k| < s + 1.
struct ShellStats {
    int shell = 0;
    std::size_t count = 0; ///< canonical representatives in the shell
    double max = -std::numeric_limits<double>::infinity();
    LatticeVector argmax;
    double min = std::numeric_limits<double>::infinity();
    LatticeVector argmin;
};

struct SearchResult {
    double max = 0.0;
    LatticeVector argmax;
    std::size_t evaluated = 0;
    std::vector<ShellStats> shells;
};

namespace detail {

// Larger value wins; equal values go to the lexicographically smaller vector.
inline bool better_max(double a, const LatticeVector& ka, double b, const LatticeVector& kb)
{
    return a > b || (a == b && ka < kb);
}

inline bool better_min(double a, const LatticeVector& ka, double b, const LatticeVector& kb)
{
    return a < b || (a == b && ka < kb);
}

} // namespace detail

/// Maximum of K_m over all nonzero |k| < search_radius, evaluated on canonical
/// representatives only.  threads = 0 uses default_thread_count().
inline SearchResult search_sup_Km(const SumConfig& cfg, double search_radius, unsigned threads = 0)
{
    detail::require(search_radius >= 2.0 * cfg.rho(), "search_sup_Km: search radius must be at least 2 rho");
    const auto reps = canonical_representatives(cfg.d(), search_radius);
    detail::require(!reps.empty(), "search_sup_Km: empty search region");
    std::vector<double> values(reps.size());
    parallel_for(reps.size(), threads, [&](std::size_t i) { values[i] = K_m(reps[i], cfg); });

    SearchResult out;
    out.evaluated = reps.size();
    out.max = values[0];
    out.argmax = reps[0];
    std::map<int, ShellStats> shells;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (detail::better_max(values[i], reps[i], out.max, out.argmax)) {
            out.max = values[i];
            out.argmax = reps[i];
        }
        const std::int64_t m = reps[i].norm_sq();
        auto s = static_cast<int>(std::sqrt(static_cast<double>(m)));
        while (static_cast<std::int64_t>(s) * s > m) {
            --s;
        }
        while (static_cast<std::int64_t>(s + 1) * (s + 1) <= m) {
            ++s;
        }
        ShellStats& st = shells[s];
        st.shell = s;
        ++st.count;
        if (st.count == 1 || detail::better_max(values[i], reps[i], st.max, st.argmax)) {
            st.max = values[i];
            st.argmax = reps[i];
        }
        if (st.count == 1 || detail::better_min(values[i], reps[i], st.min, st.argmin)) {
            st.min = values[i];
            st.argmin = reps[i];
        }
    }
    for (auto& [s, st] : shells) {
        out.shells.push_back(std::move(st));
    }
    return out;
}

/// Closed-form lower bound 2^(n/2) U_d / (2 pi)^(d/2), U_2 = (2 - sqrt 2)^(1/2), U_d = 1 for d >= 3.
inline double K_minus(int d, double n)
{
    detail::require(d >= 2, "K_minus: dimension must be at least 2");
    const double u = d == 2 ? std::sqrt(2.0 - std::sqrt(2.0)) : 1.0;
    return std::pow(2.0, n / 2.0) * u / std::pow(2.0 * M_PI, d / 2.0);
}

/// (2 pi)^(-d/2) sqrt(sup_bound).
inline double K_plus_from(int d, double sup_bound)
{
    detail::require(sup_bound >= 0.0, "K_plus_from: negative supremum bound");
    return std::sqrt(sup_bound) / std::pow(2.0 * M_PI, d / 2.0);
}

/// A decimal rounded to a number of significant digits in a fixed direction.
struct RoundedDecimal {
    double value = 0.0;
    std::string text;
};

namespace detail {

inline RoundedDecimal round_sig(double x, int digits, bool up)
{
    require(std::isfinite(x) && x > 0.0, "round_sig: requires a positive finite value");
    require(digits >= 1 && digits <= 15, "round_sig: digits out of range");
    int e = static_cast<int>(std::floor(std::log10(x)));
    auto scaled = [&](int exp10) { return x * std::pow(10.0, digits - 1 - exp10); };
    double s = scaled(e);
    // Guard against log10 landing one decade off.
    if (s >= std::pow(10.0, digits)) {
        s = scaled(++e);
    } else if (s < std::pow(10.0, digits - 1)) {
        s = scaled(--e);
    }
    auto mant = static_cast<std::int64_t>(up ? std::ceil(s) : std::floor(s));
    if (mant == static_cast<std::int64_t>(std::llround(std::pow(10.0, digits)))) {
        mant /= 10;
        ++e;
    }
    std::string m = std::to_string(mant);
    const int point = e + 1; // digits before the decimal point
    std::string text;
    if (point <= 0) {
        text = "0." + std::string(static_cast<std::size_t>(-point), '0') + m;
    } else if (point >= digits) {
        text = m + std::string(static_cast<std::size_t>(point - digits), '0');
    } else {
        text = m.substr(0, static_cast<std::size_t>(point)) + "." + m.substr(static_cast<std::size_t>(point));
    }
    return {std::stod(text), text};
}

} // namespace detail

/// Smallest decimal with `digits` significant digits that is >= x.
inline RoundedDecimal round_up_sig(double x, int digits = 3) { return detail::round_sig(x, digits, true); }

/// Largest decimal with `digits` significant digits that is <= x.
inline RoundedDecimal round_down_sig(double x, int digits = 3) { return detail::round_sig(x, digits, false); }

struct BoundCertificate {
    int d = 0;
    double n = 0.0;
    double rho = 0.0;
    int t = 0;
    double search_radius = 0.0;

    double sup_Km = 0.0;
    LatticeVector argmax;
    double delta_K = 0.0;
    Interval sup_KK; ///< [sup K_m, sup K_m + delta_K]
    double Z_n = 0.0;
    double asymptotic_bound = 0.0; ///< sup of the upper model over |k| >= search_radius

    double K_plus = 0.0;
    double K_minus = 0.0;
    RoundedDecimal K_plus_rounded;
    RoundedDecimal K_minus_rounded;

    AsymptoticModel model;
    std::vector<ShellStats> shells;
    std::size_t evaluated = 0;
    double runtime_ms = 0.0;
};

struct CertifyOptions {
    unsigned threads = 0;
    ModelOptions model{};
    int digits = 3;
};

/// Full certificate for (d, n, rho, t).  Throws inconclusive_search when the
/// outer-region model is not dominated by the searched maximum.
inline BoundCertificate certify_bounds(int d, double n, double rho, int t, double search_radius,
                                       const CertifyOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    detail::require(t >= 2 && t % 2 == 0, "certify_bounds: t must be even and >= 2");
    detail::require(search_radius >= 2.0 * rho, "certify_bounds: search radius must be at least 2 rho");
    const SumConfig cfg(d, n, rho);

    BoundCertificate c;
    c.d = d;
    c.n = n;
    c.rho = rho;
    c.t = t;
    c.search_radius = search_radius;

    c.model = build_asymptotic_model(cfg, t, opt.model);
    c.Z_n = Z_n(cfg);
    c.asymptotic_bound = asymptotic_upper_sup(c.model, search_radius);

    SearchResult search = search_sup_Km(cfg, search_radius, opt.threads);
    c.sup_Km = search.max;
    c.argmax = search.argmax;
    c.shells = std::move(search.shells);
    c.evaluated = search.evaluated;
    if (c.asymptotic_bound > c.sup_Km) {
        throw inconclusive_search("inconclusive search radius: outer-region bound " +
                                  std::to_string(c.asymptotic_bound) + " exceeds searched maximum " +
                                  std::to_string(c.sup_Km) + "; raise the search radius or rho");
    }

    c.delta_K = delta_K(d, n, rho);
    c.sup_KK = Interval{c.sup_Km, c.sup_Km + c.delta_K};
    c.K_plus = K_plus_from(d, c.sup_KK.upper);
    c.K_minus = K_minus(d, n);
    // Nudge by a few ulps so the directed decimal rounding stays on the safe side.
    c.K_plus_rounded = round_up_sig(c.K_plus * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()), opt.digits);
    c.K_minus_rounded = round_down_sig(c.K_minus * (1.0 - 8.0 * std::numeric_limits<double>::epsilon()), opt.digits);
    c.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return c;
}

} // namespace sharpk

#endif // SHARPK_CERTIFY_HPP

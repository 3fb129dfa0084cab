#ifndef SHARPK_SUMS_HPP
#define SHARPK_SUMS_HPP

// Finite lattice sums over the cutoff ball |h| < rho: the near-region part
// K_m(k) of the sharp-constant sum, its certified direct evaluation, and the
// coefficients of its large-|k| expansion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sharpk/accumulate.hpp"
#include "sharpk/errors.hpp"
#include "sharpk/kernel.hpp"
#include "sharpk/lattice.hpp"
#include "sharpk/tail.hpp"

namespace sharpk {

/// (d, n, rho) with the cutoff ball and power tables shared by every sum.
/// Immutable after construction; safe to share between threads.
class SumConfig {
public:
    SumConfig(int d, double n, double rho, std::size_t max_points = kDefaultPointBudget)
        : d_(d), n_(n), rho_(rho), cutoff_((validate(d, n, rho), rho)), ball_(enumerate_ball(d, rho, max_points))
    {
        // |k - h| < 3 rho whenever |k| < 2 rho and |h| < rho.
        const Cutoff outer(3.0 * rho);
        inv_pow_.resize(static_cast<std::size_t>(outer.first_outside()) + 1);
        for (std::size_t m = 1; m < inv_pow_.size(); ++m) {
            inv_pow_[m] = inv_pow_direct(static_cast<std::int64_t>(m));
        }
        ball_inv_pow_.resize(ball_.size());
        for (std::size_t i = 0; i < ball_.size(); ++i) {
            ball_inv_pow_[i] = inv_pow_[static_cast<std::size_t>(ball_.norm_sq[i])];
        }
    }

    [[nodiscard]] int d() const { return d_; }
    [[nodiscard]] double n() const { return n_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] const Cutoff& cutoff() const { return cutoff_; }
    [[nodiscard]] const BallEnumeration& ball() const { return ball_; }

    /// m^-(n+1) for an integer squared norm m >= 1.
    [[nodiscard]] double inv_pow(std::int64_t m) const
    {
        return static_cast<std::size_t>(m) < inv_pow_.size() ? inv_pow_[static_cast<std::size_t>(m)] : inv_pow_direct(m);
    }
    [[nodiscard]] double ball_inv_pow(std::size_t i) const { return ball_inv_pow_[i]; }

    [[nodiscard]] double inv_pow_direct(std::int64_t m) const { return std::pow(static_cast<double>(m), -(n_ + 1.0)); }

private:
    static int validate(int d, double n, double rho)
    {
        detail::require(d >= 2, "dimension d must be at least 2");
        detail::require(2.0 * n > d, "order n must exceed d/2");
        detail::require(rho > 2.0 * std::sqrt(static_cast<double>(d)), "cutoff rho must exceed 2 sqrt(d)");
        return d;
    }

    int d_;
    double n_;
    double rho_;
    Cutoff cutoff_;
    BallEnumeration ball_;
    std::vector<double> inv_pow_;
    std::vector<double> ball_inv_pow_;
};

/// Closed interval of reals.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] bool contains(double x) const { return lower <= x && x <= upper; }
    [[nodiscard]] double width() const { return upper - lower; }
};

namespace detail {

inline void require_dim(const LatticeVector& k, int d)
{
    require(k.dim() == d, "lattice vector has dimension " + std::to_string(k.dim()) + ", expected " + std::to_string(d));
}

} // namespace detail

/// Near-region part of the lattice sum,
///   K_m(k) = |k|^2n sum_{h != 0,k; |h| < rho} [1 + theta(|k-h| - rho)] |h^k|^2 / (|h|^(2n+2) |k-h|^(2n+2)).
/// For |k| >= 2 rho every weight is 2 and h = k cannot occur.
/// Summation is exact over the rounded summands, so the value depends only on
/// the multiset of summands.
inline double K_m(const LatticeVector& k, const SumConfig& cfg)
{
    detail::require_dim(k, cfg.d());
    detail::require(!k.is_zero(), "K_m: k must be nonzero");
    const auto& ball = cfg.ball();
    const std::size_t d = static_cast<std::size_t>(cfg.d());
    const std::int64_t mk = k.norm_sq();
    const bool far = !Cutoff(2.0 * cfg.rho()).contains(mk);
    const auto kc = k.coords();

    ExactSum acc;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const Coord* h = ball.coords.data() + i * d;
        __int128 dot = 0;
        std::int64_t mkh = 0;
        for (std::size_t r = 0; r < d; ++r) {
            dot += static_cast<__int128>(h[r]) * kc[r];
            const Coord diff = kc[r] - h[r];
            mkh += diff * diff;
        }
        const std::int64_t mh = ball.norm_sq[i];
        if (mkh == 0) {
            continue;
        }
        const auto wedge = static_cast<double>(static_cast<__int128>(mh) * mk - dot * dot);
        const double weight = (far || !cfg.cutoff().contains(mkh)) ? 2.0 : 1.0;
        acc.add(weight * wedge * cfg.ball_inv_pow(i) * cfg.inv_pow(mkh));
    }
    return std::pow(static_cast<double>(mk), cfg.n()) * acc.result();
}

/// Certified enclosure of the full (infinite) lattice sum K(k): the sum over
/// |h| < truncation_radius evaluated exactly, plus a tail bound that uses
/// |h^k| <= |h||k| and |k-h| >= |h|/2 on the discarded region.
inline Interval KK_direct(const LatticeVector& k, const SumConfig& cfg, double truncation_radius)
{
    detail::require_dim(k, cfg.d());
    detail::require(!k.is_zero(), "KK_direct: k must be nonzero");
    const double knorm = k.norm();
    detail::require(truncation_radius > 2.0 * (knorm + cfg.rho()),
                    "KK_direct: truncation radius must exceed 2(|k| + rho)");
    const double n = cfg.n();
    const std::int64_t mk = k.norm_sq();
    const auto kc = k.coords();
    const std::size_t d = kc.size();

    const Cutoff table_cut(truncation_radius + knorm + 1.0);
    std::vector<double> table(static_cast<std::size_t>(table_cut.first_outside()) + 1, 0.0);
    for (std::size_t m = 1; m < table.size(); ++m) {
        table[m] = cfg.inv_pow_direct(static_cast<std::int64_t>(m));
    }

    ExactSum acc;
    for_each_in_ball(cfg.d(), truncation_radius, [&](std::span<const Coord> h, std::int64_t mh) {
        __int128 dot = 0;
        std::int64_t mkh = 0;
        for (std::size_t r = 0; r < d; ++r) {
            dot += static_cast<__int128>(h[r]) * kc[r];
            const Coord diff = kc[r] - h[r];
            mkh += diff * diff;
        }
        if (mkh == 0) {
            return;
        }
        const auto wedge = static_cast<double>(static_cast<__int128>(mh) * mk - dot * dot);
        acc.add(wedge * table[static_cast<std::size_t>(mh)] * table[static_cast<std::size_t>(mkh)]);
    });
    const double kpow = std::pow(static_cast<double>(mk), n);
    const double s = kpow * acc.result();
    const double tail = std::pow(2.0, 2.0 * n + 2.0) * kpow * static_cast<double>(mk) *
                        tail_sum_bound({cfg.d(), 4.0 * n + 2.0, truncation_radius});
    const double slack = 1e-13 * s;
    return {s - slack, s + tail + slack};
}

/// sum_{h in ball} |h|^exponent.
inline double power_sum(const SumConfig& cfg, double exponent)
{
    const auto& ball = cfg.ball();
    ExactSum acc;
    for (auto it = ball.by_norm_sq.begin(); it != ball.by_norm_sq.end(); ++it) {
        const double term = std::pow(static_cast<double>(it->first), exponent / 2.0);
        for (std::size_t c = 0; c < it->second.size(); ++c) {
            acc.add(term);
        }
    }
    return acc.result();
}

/// Limit of K_m(k) as |k| -> infinity: 2 (1 - 1/d) sum_{|h|<rho} |h|^-2n.
inline double Z_n(const SumConfig& cfg)
{
    return 2.0 * (1.0 - 1.0 / cfg.d()) * power_sum(cfg, -2.0 * cfg.n());
}

/// One term c * u_1^e_1 ... u_d^e_d.
struct Monomial {
    std::vector<int> exponents;
    double coeff = 0.0;

    [[nodiscard]] int degree() const
    {
        int s = 0;
        for (int e : exponents) {
            s += e;
        }
        return s;
    }
};

/// Polynomial in the components of a unit vector u, stored in expanded form.
class SpherePolynomial {
public:
    SpherePolynomial() = default;
    SpherePolynomial(int d, std::vector<Monomial> terms) : d_(d), terms_(std::move(terms))
    {
        for (const auto& t : terms_) {
            detail::require(static_cast<int>(t.exponents.size()) == d_, "monomial dimension mismatch");
        }
        std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
            return std::pair(a.degree(), a.exponents) < std::pair(b.degree(), b.exponents);
        });
    }

    static SpherePolynomial constant(int d, double value)
    {
        return SpherePolynomial(d, {Monomial{std::vector<int>(static_cast<std::size_t>(d), 0), value}});
    }

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] const std::vector<Monomial>& terms() const { return terms_; }

    /// Coefficient of the monomial with the given exponents (0 if absent).
    [[nodiscard]] double coefficient(const std::vector<int>& exponents) const
    {
        for (const auto& t : terms_) {
            if (t.exponents == exponents) {
                return t.coeff;
            }
        }
        return 0.0;
    }

    [[nodiscard]] double operator()(std::span<const double> u) const
    {
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int r = 0; r < d_; ++r) {
                for (int e = 0; e < t.exponents[static_cast<std::size_t>(r)]; ++e) {
                    m *= u[static_cast<std::size_t>(r)];
                }
            }
            s += m;
        }
        return s;
    }

    /// Value and Euclidean gradient at u.
    double value_and_gradient(std::span<const double> u, std::span<double> grad) const
    {
        std::fill(grad.begin(), grad.end(), 0.0);
        double s = 0.0;
        std::vector<double> pw(static_cast<std::size_t>(d_));
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int r = 0; r < d_; ++r) {
                double p = 1.0;
                for (int e = 0; e < t.exponents[static_cast<std::size_t>(r)]; ++e) {
                    p *= u[static_cast<std::size_t>(r)];
                }
                pw[static_cast<std::size_t>(r)] = p;
                m *= p;
            }
            s += m;
            for (int r = 0; r < d_; ++r) {
                const int e = t.exponents[static_cast<std::size_t>(r)];
                if (e == 0) {
                    continue;
                }
                double g = t.coeff * e;
                for (int q = 0; q < d_; ++q) {
                    if (q == r) {
                        for (int i = 0; i < e - 1; ++i) {
                            g *= u[static_cast<std::size_t>(q)];
                        }
                    } else {
                        g *= pw[static_cast<std::size_t>(q)];
                    }
                }
                grad[static_cast<std::size_t>(r)] += g;
            }
        }
        return s;
    }

    /// sum |c| * degree: bounds the l1 norm of the gradient on the unit ball.
    [[nodiscard]] double gradient_bound() const
    {
        double s = 0.0;
        for (const auto& t : terms_) {
            s += std::fabs(t.coeff) * t.degree();
        }
        return s;
    }

    /// sum |c| * (deg^2 - deg): bounds the Frobenius norm of the Hessian on the unit ball.
    [[nodiscard]] double hessian_bound() const
    {
        double s = 0.0;
        for (const auto& t : terms_) {
            const double g = t.degree();
            s += std::fabs(t.coeff) * (g * g - g);
        }
        return s;
    }

    [[nodiscard]] double abs_coeff_sum() const
    {
        double s = 0.0;
        for (const auto& t : terms_) {
            s += std::fabs(t.coeff);
        }
        return s;
    }

    /// Same values on the unit sphere, every term raised to the top degree by
    /// factors of |u|^2.  Returns *this when some degree has odd parity relative
    /// to the top degree.
    [[nodiscard]] SpherePolynomial homogenized() const
    {
        int top = 0;
        for (const auto& t : terms_) {
            top = std::max(top, t.degree());
        }
        for (const auto& t : terms_) {
            if ((top - t.degree()) % 2 != 0) {
                return *this;
            }
        }
        std::map<std::vector<int>, ExactSum> acc;
        for (const auto& t : terms_) {
            const int k = (top - t.degree()) / 2;
            std::vector<int> beta(static_cast<std::size_t>(d_), 0);
            for_each_composition(k, beta, 0, [&](const std::vector<int>& b) {
                double mult = 1.0;
                int total = 0;
                auto e = t.exponents;
                for (std::size_t r = 0; r < b.size(); ++r) {
                    for (int i = 1; i <= b[r]; ++i) {
                        ++total;
                        mult = mult * total / i;
                    }
                    e[r] += 2 * b[r];
                }
                acc[e].add(t.coeff * mult);
            });
        }
        std::vector<Monomial> out;
        for (const auto& [e, sum] : acc) {
            const double c = sum.result();
            if (c != 0.0) {
                out.push_back({e, c});
            }
        }
        return SpherePolynomial(d_, std::move(out));
    }

    /// True when every exponent is even and coefficients agree across
    /// permutations of the exponent vector (relative tolerance on sum |c|).
    [[nodiscard]] bool is_signed_permutation_invariant(double rel_tol = 1e-12) const
    {
        const double tol = rel_tol * std::max(abs_coeff_sum(), std::numeric_limits<double>::min());
        std::map<std::vector<int>, std::vector<double>> classes;
        for (const auto& t : terms_) {
            if (std::fabs(t.coeff) <= tol) {
                continue;
            }
            for (int e : t.exponents) {
                if (e % 2 != 0) {
                    return false;
                }
            }
            auto key = t.exponents;
            std::sort(key.begin(), key.end());
            classes[key].push_back(t.coeff);
        }
        for (auto& [key, coeffs] : classes) {
            // number of distinct permutations of key
            double count = 1.0;
            int run = 1;
            for (std::size_t i = 1; i <= key.size(); ++i) {
                count *= static_cast<double>(i);
                if (i < key.size() && key[i] == key[i - 1]) {
                    ++run;
                    continue;
                }
                for (int j = 2; j <= run; ++j) {
                    count /= j;
                }
                run = 1;
            }
            if (static_cast<double>(coeffs.size()) != count) {
                return false;
            }
            const auto [lo, hi] = std::minmax_element(coeffs.begin(), coeffs.end());
            if (*hi - *lo > tol) {
                return false;
            }
        }
        return true;
    }

private:
    template <class Fn>
    static void for_each_composition(int total, std::vector<int>& cur, std::size_t pos, Fn&& fn)
    {
        if (pos + 1 == cur.size()) {
            cur[pos] = total;
            fn(cur);
            return;
        }
        for (int e = total; e >= 0; --e) {
            cur[pos] = e;
            for_each_composition(total - e, cur, pos + 1, fn);
        }
        cur[pos] = 0;
    }

    int d_ = 0;
    std::vector<Monomial> terms_;
};

namespace detail {

inline void multi_indices(int d, int total, std::vector<int>& cur, std::size_t pos, std::vector<std::vector<int>>& out)
{
    if (pos + 1 == static_cast<std::size_t>(d)) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int e = total; e >= 0; --e) {
        cur[pos] = e;
        multi_indices(d, total - e, cur, pos + 1, out);
    }
}

inline double multinomial(const std::vector<int>& alpha)
{
    double r = 1.0;
    int n = 0;
    for (int a : alpha) {
        for (int i = 1; i <= a; ++i) {
            ++n;
            r = r * n / i;
        }
    }
    return r;
}

} // namespace detail

/// Q_{n,l}(u) = 2 sum_{|h|<rho} Ehat_{n,l}(u . h/|h|) / |h|^(2n-l), expanded as a
/// polynomial in u.  Each power (u.hhat)^j is expanded by the multinomial
/// theorem; the coefficient of u^alpha is accumulated exactly over the ball,
/// so monomials that vanish by symmetry come out exactly zero and are dropped.
inline SpherePolynomial build_Q(const SumConfig& cfg, int ell)
{
    detail::require(ell >= 0 && ell % 2 == 0, "build_Q: ell must be even");
    const int d = cfg.d();
    const double n = cfg.n();
    const Polynomial1D ehat = substituted_coeff(n, ell, d);
    const auto& ball = cfg.ball();

    std::vector<Monomial> terms;
    for (int j = 0; j <= ehat.degree(); ++j) {
        const double ej = ehat.coeff(static_cast<std::size_t>(j));
        if (ej == 0.0) {
            continue;
        }
        if (j == 0) {
            terms.push_back({std::vector<int>(static_cast<std::size_t>(d), 0),
                             2.0 * ej * power_sum(cfg, ell - 2.0 * n)});
            continue;
        }
        std::vector<std::vector<int>> alphas;
        std::vector<int> cur(static_cast<std::size_t>(d), 0);
        detail::multi_indices(d, j, cur, 0, alphas);
        std::vector<ExactSum> acc(alphas.size());
        for (std::size_t i = 0; i < ball.size(); ++i) {
            const auto h = ball.point(i);
            const double w = std::pow(static_cast<double>(ball.norm_sq[i]), -(2.0 * n - ell + j) / 2.0);
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                double mono = 1.0;
                for (int r = 0; r < d; ++r) {
                    for (int e = 0; e < alphas[a][static_cast<std::size_t>(r)]; ++e) {
                        mono *= static_cast<double>(h[static_cast<std::size_t>(r)]);
                    }
                }
                if (mono != 0.0) {
                    acc[a].add(mono * w);
                }
            }
        }
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            const double s = acc[a].result();
            if (s != 0.0) {
                terms.push_back({alphas[a], 2.0 * ej * detail::multinomial(alphas[a]) * s});
            }
        }
    }
    return SpherePolynomial(d, std::move(terms));
}

struct SphereExtrema {
    Interval min;                 ///< encloses min over the unit sphere
    Interval max;                 ///< encloses max over the unit sphere
    std::vector<double> argmin;
    std::vector<double> argmax;
    std::size_t boxes = 0;        ///< boxes evaluated
};

struct SphereExtremaOptions {
    int initial_divisions = 32;    ///< per angle
    double relative_width = 1e-9;  ///< requested width / max(|extremum|, 1)
    std::size_t max_boxes = 4'000'000;
};

namespace detail {

/// Point on S^{d-1} from hyperspherical angles phi_0..phi_{d-2}, plus the
/// Jacobian du_i/dphi_m (row-major d x (d-1)).
inline void sphere_point(std::span<const double> phi, std::vector<double>& u, std::vector<double>& jac)
{
    const std::size_t m = phi.size();
    const std::size_t d = m + 1;
    u.assign(d, 0.0);
    jac.assign(d * m, 0.0);
    std::vector<double> s(m);
    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = std::sin(phi[i]);
        c[i] = std::cos(phi[i]);
    }
    for (std::size_t i = 0; i < d; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < i && j < m; ++j) {
            prod *= s[j];
        }
        u[i] = i < m ? prod * c[i] : prod;
        for (std::size_t q = 0; q < m; ++q) {
            double v = 0.0;
            if (q < i) {
                v = 1.0;
                for (std::size_t j = 0; j < i && j < m; ++j) {
                    v *= (j == q) ? c[j] : s[j];
                }
                if (i < m) {
                    v *= c[i];
                }
            } else if (q == i && i < m) {
                v = -prod * s[i];
            }
            jac[i * m + q] = v;
        }
    }
}

/// Reverses the coordinate order of a chart point.  The hyperspherical chart
/// degenerates where trailing coordinates vanish; reversed, that set has
/// u_1 = 0 and misses the cap u_1 >= ... >= u_d >= 0.
inline void reverse_chart(std::vector<double>& u, std::vector<double>& jac, std::size_t m)
{
    const std::size_t d = u.size();
    std::reverse(u.begin(), u.end());
    for (std::size_t i = 0; i < d / 2; ++i) {
        std::swap_ranges(jac.begin() + static_cast<std::ptrdiff_t>(i * m),
                         jac.begin() + static_cast<std::ptrdiff_t>((i + 1) * m),
                         jac.begin() + static_cast<std::ptrdiff_t>((d - 1 - i) * m));
    }
}

struct AngleBox {
    std::vector<double> lo;
    std::vector<double> hi;
    double value = 0.0; ///< objective at the center
    double bound = 0.0; ///< upper bound over the box
};

struct BoxOrder {
    bool operator()(const AngleBox& a, const AngleBox& b) const { return a.bound < b.bound; }
};

/// Branch and bound for max of sign * q over the sphere.  Each box bound is the
/// second-order Taylor majorant f(c) + |grad f(c)| . w + H |w|^2 / 2 in angle
/// space, with H >= |Hessian| of the composed map on the whole domain.
inline std::pair<Interval, std::vector<double>> maximize_on_sphere(const SpherePolynomial& q, double sign,
                                                                    bool symmetric, const SphereExtremaOptions& opt,
                                                                    std::size_t& boxes)
{
    const int d = q.dim();
    const std::size_t m = static_cast<std::size_t>(d - 1);
    const double hess = q.hessian_bound() + (d - 1) * q.gradient_bound();

    std::vector<double> u;
    std::vector<double> jac;
    std::vector<double> grad(static_cast<std::size_t>(d));
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_u;

    auto evaluate = [&](AngleBox& box) {
        std::vector<double> center(m);
        double w2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            center[i] = 0.5 * (box.lo[i] + box.hi[i]);
            const double w = 0.5 * (box.hi[i] - box.lo[i]);
            w2 += w * w;
        }
        sphere_point(center, u, jac);
        if (symmetric) {
            reverse_chart(u, jac, m);
        }
        const double f = sign * q.value_and_gradient(u, grad);
        double lin = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double g = 0.0;
            for (std::size_t r = 0; r < static_cast<std::size_t>(d); ++r) {
                g += jac[r * m + i] * grad[r];
            }
            lin += std::fabs(sign * g) * 0.5 * (box.hi[i] - box.lo[i]);
        }
        box.value = f;
        box.bound = f + lin + 0.5 * hess * w2;
        ++boxes;
        if (f > best) {
            best = f;
            best_u = u;
        }
    };

    // On [0, pi/2]^(d-1) every chart coordinate is a product of monotone factors, so its range
    // over a box comes from two corners.  Boxes where some u_i < u_{i+1}
    // throughout lie outside the cap u_1 >= ... >= u_d >= 0.
    auto outside_cap = [&](const AngleBox& box) {
        if (!symmetric) {
            return false;
        }
        std::vector<double> umin(static_cast<std::size_t>(d));
        std::vector<double> umax(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
            double lo = 1.0;
            double hi = 1.0;
            for (std::size_t j = 0; j < i && j < m; ++j) {
                lo *= std::sin(box.lo[j]);
                hi *= std::sin(box.hi[j]);
            }
            if (i < m) {
                lo *= std::cos(box.hi[i]);
                hi *= std::cos(box.lo[i]);
            }
            umin[i] = lo;
            umax[i] = hi;
        }
        std::reverse(umin.begin(), umin.end());
        std::reverse(umax.begin(), umax.end());
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(d); ++i) {
            if (umax[i] < umin[i + 1]) {
                return true;
            }
        }
        return false;
    };

    std::priority_queue<AngleBox, std::vector<AngleBox>, BoxOrder> queue;
    const int div = std::max(1, opt.initial_divisions);
    std::vector<double> span_hi(m, symmetric ? M_PI / 2.0 : M_PI);
    if (!symmetric && m > 0) {
        span_hi[m - 1] = 2.0 * M_PI;
    }
    std::vector<int> idx(m, 0);
    for (;;) {
        AngleBox box;
        box.lo.resize(m);
        box.hi.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            box.lo[i] = span_hi[i] * idx[i] / div;
            box.hi[i] = span_hi[i] * (idx[i] + 1) / div;
        }
        if (!outside_cap(box)) {
            evaluate(box);
            queue.push(std::move(box));
        }
        std::size_t i = 0;
        while (i < m && ++idx[i] == div) {
            idx[i++] = 0;
        }
        if (i == m) {
            break;
        }
    }

    const double scale_tol = opt.relative_width;
    while (!queue.empty()) {
        const double tol = scale_tol * std::max(std::fabs(best), 1.0);
        if (queue.top().bound - best <= tol) {
            break;
        }
        if (boxes > opt.max_boxes) {
            throw enclosure_failure("extremize_Q: width " + std::to_string(queue.top().bound - best) +
                                    " after " + std::to_string(boxes) + " boxes");
        }
        AngleBox top = queue.top();
        queue.pop();
        const std::size_t children = std::size_t{1} << m;
        for (std::size_t c = 0; c < children; ++c) {
            AngleBox child;
            child.lo.resize(m);
            child.hi.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double mid = 0.5 * (top.lo[i] + top.hi[i]);
                const bool upper = (c >> i) & 1U;
                child.lo[i] = upper ? mid : top.lo[i];
                child.hi[i] = upper ? top.hi[i] : mid;
            }
            if (outside_cap(child)) {
                continue;
            }
            evaluate(child);
            if (child.bound > best) {
                queue.push(std::move(child));
            }
        }
    }
    const double upper = queue.empty() ? best : std::max(best, queue.top().bound);
    return {Interval{best, upper}, best_u};
}

} // namespace detail

/// Enclosures of min and max of q over the unit sphere.  Signed-permutation
/// invariant polynomials are searched on the cap u_1 >= ... >= u_d >= 0 only.
inline SphereExtrema extremize_Q(const SpherePolynomial& q, const SphereExtremaOptions& opt = {})
{
    detail::require(q.dim() >= 2, "extremize_Q: dimension must be at least 2");
    const bool symmetric = q.is_signed_permutation_invariant();
    // Large coefficients that cancel on the sphere inflate the derivative bounds.
    const SpherePolynomial h = q.homogenized();
    const SpherePolynomial& work = h.abs_coeff_sum() < q.abs_coeff_sum() ? h : q;
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(q.abs_coeff_sum(), h.abs_coeff_sum()) *
                         static_cast<double>(std::max(q.terms().size(), h.terms().size()) + 1);
    SphereExtrema out;
    auto [hi, argmax] = detail::maximize_on_sphere(work, 1.0, symmetric, opt, out.boxes);
    auto [neg, argmin] = detail::maximize_on_sphere(work, -1.0, symmetric, opt, out.boxes);
    hi.lower -= slack;
    hi.upper += slack;
    neg.lower -= slack;
    neg.upper += slack;
    out.max = hi;
    out.min = Interval{-neg.upper, -neg.lower};
    out.argmax = std::move(argmax);
    out.argmin = std::move(argmin);
    return out;
}

/// (v, V) = (2 mu S, 2 M S) with S = sum_{|h|<rho} |h|^(t - 2n).
inline std::pair<double, double> vV_nt(const SumConfig& cfg, int t, const RemainderExtrema& extrema)
{
    detail::require(t >= 2 && t % 2 == 0, "vV_nt: t must be even and >= 2");
    const double s = power_sum(cfg, t - 2.0 * cfg.n());
    return {2.0 * extrema.mu * s, 2.0 * extrema.M * s};
}

} // namespace sharpk

#endif // SHARPK_SUMS_HPP

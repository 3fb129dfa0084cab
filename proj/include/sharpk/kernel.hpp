#ifndef SHARPK_KERNEL_HPP
#define SHARPK_KERNEL_HPP

// The kernel E_n(c, xi) = (1 - c^2) / (1 - 2 c xi + xi^2)^(n+1), its Taylor
// coefficients in xi and certified extrema of the order-t Taylor remainder.
//
// Here c is the cosine of the angle between h and k and xi = |h| / |k|; the
// lattice summand of the sharp-constant sum equals E_n(c, xi) / |h|^(2n).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sharpk/errors.hpp"

namespace sharpk {

/// Univariate polynomial in c, ascending coefficients.
class Polynomial1D {
public:
    Polynomial1D() = default;
    explicit Polynomial1D(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
    [[nodiscard]] double coeff(std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : 0.0; }
    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    [[nodiscard]] double operator()(double c) const
    {
        double r = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            r = r * c + *it;
        }
        return r;
    }

private:
    void trim()
    {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) {
            coeffs_.pop_back();
        }
    }

    std::vector<double> coeffs_;
};

inline double eval_E(double n, double c, double xi)
{
    if (!(c >= -1.0 && c <= 1.0) || !(xi >= 0.0)) {
        throw domain_error("eval_E: requires c in [-1,1] and xi >= 0");
    }
    const double base = 1.0 - 2.0 * c * xi + xi * xi;
    if ((c == 1.0 && xi == 1.0) || !(base > 0.0)) {
        throw domain_error("eval_E: singular point (c, xi) = (1, 1)");
    }
    return (1.0 - c * c) * std::pow(base, -(n + 1.0));
}

namespace detail {

/// Values G_0(c), ..., G_{count-1}(c) of the Gegenbauer polynomials C^(n+1)_l,
/// i.e. the xi-expansion coefficients of (1 - 2 c xi + xi^2)^-(n+1).
inline void gegenbauer_values(double n, double c, std::size_t count, std::vector<double>& out)
{
    const double lambda = n + 1.0;
    out.resize(count);
    if (count > 0) {
        out[0] = 1.0;
    }
    if (count > 1) {
        out[1] = 2.0 * lambda * c;
    }
    for (std::size_t l = 2; l < count; ++l) {
        const double ld = static_cast<double>(l);
        out[l] = (2.0 * c * (ld + lambda - 1.0) * out[l - 1] - (ld + 2.0 * lambda - 2.0) * out[l - 2]) / ld;
    }
}

} // namespace detail

/// E_{n,l}(c) = (1 - c^2) C^(n+1)_l(c), from the three-term recurrence
///   l C_l = 2c (l + n) C_{l-1} - (l + 2n) C_{l-2},  C_0 = 1,  C_1 = 2(n+1)c.
inline Polynomial1D taylor_coeff(double n, int ell)
{
    detail::require(ell >= 0, "taylor_coeff: ell must be nonnegative");
    std::vector<double> prev2{1.0};
    std::vector<double> prev1{0.0, 2.0 * (n + 1.0)};
    std::vector<double> cur = prev2;
    if (ell == 1) {
        cur = prev1;
    }
    for (int l = 2; l <= ell; ++l) {
        const double ld = l;
        cur.assign(static_cast<std::size_t>(l) + 1, 0.0);
        for (std::size_t j = 0; j < prev1.size(); ++j) {
            cur[j + 1] += 2.0 * (ld + n) * prev1[j];
        }
        for (std::size_t j = 0; j < prev2.size(); ++j) {
            cur[j] -= (ld + 2.0 * n) * prev2[j];
        }
        for (auto& x : cur) {
            x /= ld;
        }
        prev2 = std::move(prev1);
        prev1 = cur;
    }
    std::vector<double> e(cur.size() + 2, 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) {
        e[j] += cur[j];
        e[j + 2] -= cur[j];
    }
    return Polynomial1D(std::move(e));
}

/// E_{n,l} with its c^2 term replaced by the constant (coefficient)/d.
inline Polynomial1D substituted_coeff(double n, int ell, int d)
{
    detail::require(ell >= 0 && ell % 2 == 0, "substituted_coeff: ell must be even");
    detail::require(d >= 1, "substituted_coeff: dimension must be positive");
    std::vector<double> e = taylor_coeff(n, ell).coefficients();
    e.resize(std::max<std::size_t>(e.size(), 3), 0.0);
    e[0] += e[2] / static_cast<double>(d);
    e[2] = 0.0;
    return Polynomial1D(std::move(e));
}

/// Below this xi the remainder is summed from its Taylor tail instead of the
/// cancellation-prone quotient.
inline constexpr double kRemainderSeriesBelow = 0.1;

/// R_{n,t}(c, xi) = xi^-t (E_n(c,xi) - sum_{l<t} E_{n,l}(c) xi^l), and E_{n,t}(c) at xi = 0.
inline double eval_remainder(double n, int t, double c, double xi)
{
    detail::require(t >= 1, "eval_remainder: t must be positive");
    if (!(c >= -1.0 && c <= 1.0) || !(xi >= 0.0 && xi <= 0.5)) {
        throw domain_error("eval_remainder: requires c in [-1,1], xi in [0,1/2]");
    }
    const double w = 1.0 - c * c;
    std::vector<double> g;
    if (xi < kRemainderSeriesBelow) {
        // sum_{l >= t} G_l(c) xi^(l-t); |G_l(c)| <= G_l(1) = binom(l + 2n + 1, l) bounds the tail.
        const double lambda = n + 1.0;
        double gm2 = 1.0;
        double gm1 = 2.0 * lambda * c;
        double bound = 1.0; // G_l(1) xi^(l-t), tracked from l = t on
        double sum = 0.0;
        double scale = 0.0;
        double xp = 1.0;
        for (int l = 0;; ++l) {
            double gl = 0.0;
            if (l == 0) {
                gl = gm2;
            } else if (l == 1) {
                gl = gm1;
            } else {
                const double ld = l;
                gl = (2.0 * c * (ld + lambda - 1.0) * gm1 - (ld + 2.0 * lambda - 2.0) * gm2) / ld;
                gm2 = gm1;
                gm1 = gl;
            }
            if (l < t) {
                continue;
            }
            if (l == t) {
                // G_t(1) = binom(t + 2n + 1, t)
                bound = 1.0;
                for (int i = 1; i <= t; ++i) {
                    bound *= (2.0 * n + 1.0 + i) / i;
                }
            } else {
                bound *= (l + 2.0 * n + 1.0) / l * xi;
                xp *= xi;
            }
            const double term = gl * xp;
            sum += term;
            scale = std::max(scale, std::fabs(term));
            const double ratio = (l + 2.0 * n + 2.0) / (l + 1.0) * xi;
            if (ratio < 0.5) {
                const double tail = bound * ratio / (1.0 - ratio);
                if (tail <= 1e-17 * std::max(scale, std::fabs(sum)) || tail < 1e-300) {
                    break;
                }
            }
            if (l > 100000) {
                throw domain_error("eval_remainder: series did not converge");
            }
        }
        return w * sum;
    }
    detail::gegenbauer_values(n, c, static_cast<std::size_t>(t), g);
    double poly = 0.0;
    for (int l = t - 1; l >= 0; --l) {
        poly = poly * xi + g[static_cast<std::size_t>(l)];
    }
    const double base = 1.0 - 2.0 * c * xi + xi * xi;
    const double full = std::pow(base, -(n + 1.0));
    return w * (full - poly) / std::pow(xi, t);
}

/// Sup of b_n(c, xi) = (1 - c^2)(1 + 2 c xi + xi^2)^n / (1 + xi^(2n)):
/// 2^(2n+1) (n+1)^(n+1) / (n+2)^(n+2), attained at (n/(n+2), 1).
inline double wedge_power_constant(double n)
{
    return std::exp((2.0 * n + 1.0) * std::log(2.0) + (n + 1.0) * std::log(n + 1.0) - (n + 2.0) * std::log(n + 2.0));
}

inline double wedge_power_kernel(double n, double c, double xi)
{
    return (1.0 - c * c) * std::pow(1.0 + 2.0 * c * xi + xi * xi, n) / (1.0 + std::pow(xi, 2.0 * n));
}

struct RemainderExtrema {
    double mu = 0.0;          ///< lower enclosure of min R_{nt}
    double mu_attained = 0.0; ///< smallest value actually evaluated (>= true min)
    double M = 0.0;           ///< upper enclosure of max R_{nt}
    double M_attained = 0.0;  ///< largest value actually evaluated (<= true max)
    std::pair<double, double> argmin{0.0, 0.0}; ///< (c, xi)
    std::pair<double, double> argmax{0.0, 0.0};
    int grid_resolution = 0;  ///< points along c of the initial grid
    double margin = 0.0;      ///< largest cell margin on the initial grid
    int refinement_levels = 0;

    [[nodiscard]] double mu_width() const { return mu_attained - mu; }
    [[nodiscard]] double M_width() const { return M - M_attained; }
};

struct RemainderExtremaOptions {
    int c_points = 2001;
    int xi_points = 1001;
    double relative_width = 1e-4; ///< requested width / max(|extremum|, 1)
    double safety = 4.0;          ///< multiplier on sampled second differences
    int subdivision = 4;
    int max_levels = 8;
    std::size_t max_cells = 2'000'000;
};

namespace detail {

struct Cell {
    double c0, c1, x0, x1;
    double extreme; // max (or min) over the evaluated corners
    double margin;  // interpolation error bound on the cell
};

/// Refines the cells that may still hide a value beyond `best` until the
/// enclosure width drops below `target`.  sign = +1 for the max, -1 for the min.
/// Returns the outer bound (upper for max, lower for min) and updates best.
template <class Fn>
double refine_extremum(Fn& f, std::vector<Cell> cells, double sign, double target, double& best,
                       std::pair<double, double>& arg, const RemainderExtremaOptions& opt, int& levels)
{
    double settled = sign * best; // sign-normalized outer bound of discarded cells
    const int s = opt.subdivision;
    for (int level = 0;; ++level) {
        double outer = settled;
        std::vector<Cell> active;
        for (const auto& cell : cells) {
            const double ub = sign * cell.extreme + cell.margin;
            if (ub > sign * best + target) {
                active.push_back(cell);
            } else {
                settled = std::max(settled, ub);
            }
            outer = std::max(outer, ub);
        }
        if (active.empty()) {
            levels = std::max(levels, level);
            return sign * std::max(settled, sign * best);
        }
        if (level >= opt.max_levels || active.size() * static_cast<std::size_t>(s * s) > opt.max_cells) {
            throw enclosure_failure("remainder_extrema: enclosure width " + std::to_string(outer - sign * best) +
                                    " exceeds the requested " + std::to_string(target));
        }
        cells.clear();
        std::vector<double> vals(static_cast<std::size_t>((s + 1) * (s + 1)));
        for (const auto& cell : active) {
            const double hc = (cell.c1 - cell.c0) / s;
            const double hx = (cell.x1 - cell.x0) / s;
            for (int i = 0; i <= s; ++i) {
                for (int j = 0; j <= s; ++j) {
                    const double c = i == s ? cell.c1 : cell.c0 + i * hc;
                    const double x = j == s ? cell.x1 : cell.x0 + j * hx;
                    const double v = f(c, x);
                    vals[static_cast<std::size_t>(i * (s + 1) + j)] = v;
                    if (sign * v > sign * best) {
                        best = v;
                        arg = {c, x};
                    }
                }
            }
            for (int i = 0; i < s; ++i) {
                for (int j = 0; j < s; ++j) {
                    auto at = [&](int a, int b) { return sign * vals[static_cast<std::size_t>(a * (s + 1) + b)]; };
                    const double e = std::max({at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)});
                    cells.push_back({i == 0 ? cell.c0 : cell.c0 + i * hc, i + 1 == s ? cell.c1 : cell.c0 + (i + 1) * hc,
                                     j == 0 ? cell.x0 : cell.x0 + j * hx, j + 1 == s ? cell.x1 : cell.x0 + (j + 1) * hx,
                                     sign * e, cell.margin / static_cast<double>(s * s)});
                }
            }
        }
    }
}

} // namespace detail

/// Enclosures of min and max of R_{nt} over [-1,1] x [0,1/2].
///
/// A uniform grid is evaluated first.  On a cell with steps (hc, hx) the
/// function deviates from its bilinear interpolant by at most
/// (hc^2 |R_cc| + hx^2 |R_xx|) / 8; the second partials are bounded by the
/// sampled second differences times `safety`.  Cells whose bound could still
/// beat the best value are subdivided until the requested width is reached.
inline RemainderExtrema remainder_extrema(double n, int t, const RemainderExtremaOptions& opt = {})
{
    detail::require(t >= 1, "remainder_extrema: t must be positive");
    detail::require(opt.c_points >= 3 && opt.xi_points >= 3, "remainder_extrema: grid too coarse");
    const int nc = opt.c_points;
    const int nx = opt.xi_points;
    const double hc = 2.0 / (nc - 1);
    const double hx = 0.5 / (nx - 1);
    auto cval = [&](int i) { return i == nc - 1 ? 1.0 : -1.0 + i * hc; };
    auto xval = [&](int j) { return j == nx - 1 ? 0.5 : j * hx; };
    auto f = [&](double c, double x) { return eval_remainder(n, t, c, x); };

    std::vector<double> grid(static_cast<std::size_t>(nc) * nx);
    auto at = [&](int i, int j) -> double& { return grid[static_cast<std::size_t>(i) * nx + j]; };
    RemainderExtrema out;
    out.M_attained = -std::numeric_limits<double>::infinity();
    out.mu_attained = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nx; ++j) {
            const double v = f(cval(i), xval(j));
            at(i, j) = v;
            if (v > out.M_attained) {
                out.M_attained = v;
                out.argmax = {cval(i), xval(j)};
            }
            if (v < out.mu_attained) {
                out.mu_attained = v;
                out.argmin = {cval(i), xval(j)};
            }
        }
    }

    // |second difference| per node in each direction, summed; nodes on the
    // border borrow from their interior neighbour.
    std::vector<float> curv(static_cast<std::size_t>(nc) * nx);
    auto node_curv = [&](int i, int j) {
        const int ii = std::clamp(i, 1, nc - 2);
        const int jj = std::clamp(j, 1, nx - 2);
        return std::fabs(at(ii + 1, j) - 2.0 * at(ii, j) + at(ii - 1, j)) +
               std::fabs(at(i, jj + 1) - 2.0 * at(i, jj) + at(i, jj - 1));
    };
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nx; ++j) {
            curv[static_cast<std::size_t>(i) * nx + j] = static_cast<float>(node_curv(i, j) * (1.0 + 1e-6));
        }
    }
    // Cell margin: (hc^2 |R_cc| + hx^2 |R_xx|) / 8 with the partials bounded by
    // `safety` times the largest second difference on the surrounding 4x4 nodes.
    auto cell_margin = [&](int i, int j) {
        double m = 0.0;
        for (int a = std::max(i - 1, 0); a <= std::min(i + 2, nc - 1); ++a) {
            for (int b = std::max(j - 1, 0); b <= std::min(j + 2, nx - 1); ++b) {
                m = std::max(m, static_cast<double>(curv[static_cast<std::size_t>(a) * nx + b]));
            }
        }
        return opt.safety * m / 8.0;
    };
    out.grid_resolution = nc;

    std::vector<detail::Cell> max_cells;
    std::vector<detail::Cell> min_cells;
    max_cells.reserve(static_cast<std::size_t>(nc - 1) * (nx - 1));
    min_cells.reserve(max_cells.capacity());
    for (int i = 0; i + 1 < nc; ++i) {
        for (int j = 0; j + 1 < nx; ++j) {
            const double a = at(i, j);
            const double b = at(i + 1, j);
            const double c = at(i, j + 1);
            const double d = at(i + 1, j + 1);
            const double m = cell_margin(i, j);
            out.margin = std::max(out.margin, m);
            max_cells.push_back({cval(i), cval(i + 1), xval(j), xval(j + 1), std::max({a, b, c, d}), m});
            min_cells.push_back({cval(i), cval(i + 1), xval(j), xval(j + 1), std::min({a, b, c, d}), m});
        }
    }
    grid.clear();
    grid.shrink_to_fit();
    curv.clear();
    curv.shrink_to_fit();

    int levels = 0;
    const double max_target = opt.relative_width * std::max(std::fabs(out.M_attained), 1.0);
    const double min_target = opt.relative_width * std::max(std::fabs(out.mu_attained), 1.0);
    double upper = detail::refine_extremum(f, std::move(max_cells), 1.0, max_target, out.M_attained,
                                           out.argmax, opt, levels);
    double lower = detail::refine_extremum(f, std::move(min_cells), -1.0, min_target, out.mu_attained,
                                           out.argmin, opt, levels);
    // Outward slack for evaluation rounding.
    upper += 1e-9 * std::max(std::fabs(upper), 1.0);
    lower -= 1e-9 * std::max(std::fabs(lower), 1.0);
    out.M = upper;
    out.mu = lower;
    out.refinement_levels = levels;
    return out;
}

} // namespace sharpk

#endif // SHARPK_KERNEL_HPP

#ifndef SHARPK_FIELDS_HPP
#define SHARPK_FIELDS_HPP

// Finitely supported real vector fields on the d-torus in Fourier form:
// Leray projection, the advection term v . grad w, Sobolev norms, and the
// two-mode trial fields behind the lower bound K-.

#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sharpk/errors.hpp"
#include "sharpk/lattice.hpp"

namespace sharpk {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// v = sum_k v_k e_k with v_{-k} = conj(v_k) and no k = 0 mode.  Both k and
/// -k are stored.
class FourierField {
public:
    explicit FourierField(int d) : d_(d) { detail::require(d >= 1, "FourierField: dimension must be positive"); }

    /// Builds a field from explicit coefficients and validates it.
    FourierField(int d, std::map<LatticeVector, ComplexVector> coeffs, double tol = 0.0)
        : d_(d), coeffs_(std::move(coeffs))
    {
        validate(tol);
    }

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] const std::map<LatticeVector, ComplexVector>& coeffs() const { return coeffs_; }
    [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

    /// Sets v_k = c and v_{-k} = conj(c).
    void set_mode(const LatticeVector& k, const ComplexVector& c)
    {
        detail::require(k.dim() == d_, "FourierField: mode dimension mismatch");
        detail::require(static_cast<int>(c.size()) == d_, "FourierField: coefficient dimension mismatch");
        detail::require(!k.is_zero(), "FourierField: the k = 0 mode is excluded (zero mean)");
        coeffs_[k] = c;
        ComplexVector cc(c.size());
        for (std::size_t r = 0; r < c.size(); ++r) {
            cc[r] = std::conj(c[r]);
        }
        coeffs_[-k] = std::move(cc);
    }

    /// v_k, or the zero vector off the support.
    [[nodiscard]] ComplexVector coefficient(const LatticeVector& k) const
    {
        const auto it = coeffs_.find(k);
        return it == coeffs_.end() ? ComplexVector(static_cast<std::size_t>(d_)) : it->second;
    }

    /// Checks dimensions, the absence of k = 0 and v_{-k} = conj(v_k) to tol.
    void validate(double tol = 0.0) const
    {
        for (const auto& [k, c] : coeffs_) {
            detail::require(k.dim() == d_ && static_cast<int>(c.size()) == d_, "FourierField: dimension mismatch");
            detail::require(!k.is_zero(), "FourierField: the k = 0 mode is excluded (zero mean)");
            const auto it = coeffs_.find(-k);
            detail::require(it != coeffs_.end(), "FourierField: missing conjugate mode for " + k.to_string());
            for (std::size_t r = 0; r < c.size(); ++r) {
                detail::require(std::abs(it->second[r] - std::conj(c[r])) <= tol,
                                "FourierField: reality violated at " + k.to_string());
            }
        }
    }

    [[nodiscard]] bool is_divergence_free(double tol = 1e-12) const
    {
        for (const auto& [k, c] : coeffs_) {
            Complex dot = 0.0;
            double scale = 0.0;
            for (std::size_t r = 0; r < c.size(); ++r) {
                dot += static_cast<double>(k[r]) * c[r];
                scale += std::fabs(static_cast<double>(k[r])) * std::abs(c[r]);
            }
            if (std::abs(dot) > tol * std::max(scale, 1.0)) {
                return false;
            }
        }
        return true;
    }

    FourierField& operator*=(double s)
    {
        for (auto& [k, c] : coeffs_) {
            for (auto& x : c) {
                x *= s;
            }
        }
        return *this;
    }

private:
    int d_;
    std::map<LatticeVector, ComplexVector> coeffs_;
};

inline FourierField operator*(double s, FourierField f) { return f *= s; }

/// Per mode c -> c - (k.c / |k|^2) k.
inline FourierField leray_project(const FourierField& field)
{
    std::map<LatticeVector, ComplexVector> out;
    for (const auto& [k, c] : field.coeffs()) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < c.size(); ++r) {
            dot += static_cast<double>(k[r]) * c[r];
        }
        const double m = static_cast<double>(k.norm_sq());
        ComplexVector p = c;
        for (std::size_t r = 0; r < c.size(); ++r) {
            p[r] -= dot / m * static_cast<double>(k[r]);
        }
        out.emplace(k, std::move(p));
    }
    return FourierField(field.dim(), std::move(out), std::numeric_limits<double>::infinity());
}

namespace detail {

inline std::map<LatticeVector, ComplexVector> advect_all(const FourierField& v, const FourierField& w)
{
    require(v.dim() == w.dim(), "advect: dimension mismatch");
    const auto d = static_cast<std::size_t>(v.dim());
    const double scale = 1.0 / std::pow(2.0 * M_PI, v.dim() / 2.0);
    const Complex i_scale(0.0, scale);
    std::map<LatticeVector, ComplexVector> out;
    for (const auto& [h, vh] : v.coeffs()) {
        for (const auto& [g, wg] : w.coeffs()) {
            // (v . grad w)_k gets i (2 pi)^(-d/2) (v_h . g) w_g at k = h + g.
            Complex dot = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                dot += vh[r] * static_cast<double>(g[r]);
            }
            if (dot == 0.0) {
                continue;
            }
            auto& acc = out.try_emplace(h + g, ComplexVector(d)).first->second;
            for (std::size_t r = 0; r < d; ++r) {
                acc[r] += i_scale * dot * wg[r];
            }
        }
    }
    return out;
}

} // namespace detail

/// Fourier coefficients of v . grad w away from k = 0.
inline FourierField advect(const FourierField& v, const FourierField& w)
{
    auto all = detail::advect_all(v, w);
    all.erase(LatticeVector::zero(v.dim()));
    std::map<LatticeVector, ComplexVector> kept;
    for (auto& [k, c] : all) {
        bool nonzero = false;
        for (const auto& x : c) {
            nonzero = nonzero || x != 0.0;
        }
        if (nonzero) {
            kept.emplace(k, std::move(c));
        }
    }
    return FourierField(v.dim(), std::move(kept), std::numeric_limits<double>::infinity());
}

/// The k = 0 coefficient of v . grad w; zero when v is divergence free.
inline ComplexVector advect_mean(const FourierField& v, const FourierField& w)
{
    auto all = detail::advect_all(v, w);
    const auto it = all.find(LatticeVector::zero(v.dim()));
    return it == all.end() ? ComplexVector(static_cast<std::size_t>(v.dim())) : it->second;
}

/// sqrt(sum |k|^2n |v_k|^2).
inline double sobolev_norm(const FourierField& field, double n)
{
    double s = 0.0;
    for (const auto& [k, c] : field.coeffs()) {
        double a = 0.0;
        for (const auto& x : c) {
            a += std::norm(x);
        }
        s += std::pow(static_cast<double>(k.norm_sq()), n) * a;
    }
    return std::sqrt(s);
}

/// sum_h |h|^2n |v_h|^2 |k-h|^(2n+2) |w_{k-h}|^2: the factor paired with K_n(k)
/// when |k|^2n |(v . grad w)_k|^2 is bounded by Cauchy-Schwarz.
inline double convolution_weight(const FourierField& v, const FourierField& w, const LatticeVector& k, double n)
{
    double s = 0.0;
    for (const auto& [h, vh] : v.coeffs()) {
        const auto it = w.coeffs().find(k - h);
        if (it == w.coeffs().end()) {
            continue;
        }
        double av = 0.0;
        double aw = 0.0;
        for (std::size_t r = 0; r < vh.size(); ++r) {
            av += std::norm(vh[r]);
            aw += std::norm(it->second[r]);
        }
        s += std::pow(static_cast<double>(h.norm_sq()), n) * av *
             std::pow(static_cast<double>((k - h).norm_sq()), n + 1.0) * aw;
    }
    return s;
}

/// One line per stored mode: k_1 ... k_d re_1 im_1 ... re_d im_d.
inline void write_field(std::ostream& os, const FourierField& field)
{
    std::ostringstream line;
    line.precision(17);
    for (const auto& [k, c] : field.coeffs()) {
        line.str("");
        for (std::size_t r = 0; r < static_cast<std::size_t>(field.dim()); ++r) {
            line << k[r] << ' ';
        }
        for (std::size_t r = 0; r < c.size(); ++r) {
            line << c[r].real() << ' ' << c[r].imag() << (r + 1 < c.size() ? " " : "");
        }
        os << line.str() << '\n';
    }
}

/// Reads the format of write_field; blank lines and lines starting with '#'
/// are skipped.  The result is validated.
inline FourierField read_field(std::istream& is, int d, double tol = 0.0)
{
    std::map<LatticeVector, ComplexVector> coeffs;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream in(line);
        std::vector<Coord> k(static_cast<std::size_t>(d));
        ComplexVector c(static_cast<std::size_t>(d));
        for (auto& x : k) {
            in >> x;
        }
        for (auto& x : c) {
            double re = 0.0;
            double im = 0.0;
            in >> re >> im;
            x = Complex(re, im);
        }
        std::string extra;
        detail::require(!in.fail() && !(in >> extra), "read_field: malformed line " + std::to_string(lineno));
        detail::require(coeffs.emplace(LatticeVector(std::move(k)), std::move(c)).second,
                        "read_field: duplicate mode on line " + std::to_string(lineno));
    }
    return FourierField(d, std::move(coeffs), tol);
}

/// Two-mode fields v = A e_a + conj(A) e_-a, w = B e_b + conj(B) e_-b with
/// a = e_1, b = e_2, A = (0, alpha, alpha_vec), B = (beta, 0, beta_vec).
struct TrialFields {
    FourierField v;
    FourierField w;
};

inline TrialFields trial_fields(int d, Complex alpha, const ComplexVector& alpha_vec, Complex beta,
                                const ComplexVector& beta_vec)
{
    detail::require(d >= 2, "trial fields: dimension must be at least 2");
    detail::require(static_cast<int>(alpha_vec.size()) == d - 2 && static_cast<int>(beta_vec.size()) == d - 2,
                    "trial fields: amplitude vectors must have d - 2 entries");
    auto nonzero = [](Complex s, const ComplexVector& vec) {
        bool any = s != 0.0;
        for (const auto& x : vec) {
            any = any || x != 0.0;
        }
        return any;
    };
    detail::require(nonzero(alpha, alpha_vec), "trial fields: (alpha, alpha_vec) must be nonzero");
    detail::require(nonzero(beta, beta_vec), "trial fields: (beta, beta_vec) must be nonzero");

    const auto dz = static_cast<std::size_t>(d);
    std::vector<Coord> a(dz, 0);
    std::vector<Coord> b(dz, 0);
    a[0] = 1;
    b[1] = 1;
    ComplexVector A(dz);
    ComplexVector B(dz);
    A[1] = alpha;
    B[0] = beta;
    for (std::size_t r = 2; r < dz; ++r) {
        A[r] = alpha_vec[r - 2];
        B[r] = beta_vec[r - 2];
    }
    TrialFields tf{FourierField(d), FourierField(d)};
    tf.v.set_mode(LatticeVector(a), A);
    tf.w.set_mode(LatticeVector(b), B);
    return tf;
}

/// ||L(v . grad w)||_n / (||v||_n ||w||_{n+1}) for the trial fields, computed
/// through advect, leray_project and sobolev_norm.
inline double lower_bound_witness(int d, double n, Complex alpha, const ComplexVector& alpha_vec, Complex beta,
                                  const ComplexVector& beta_vec)
{
    const TrialFields tf = trial_fields(d, alpha, alpha_vec, beta, beta_vec);
    const FourierField p = leray_project(advect(tf.v, tf.w));
    return sobolev_norm(p, n) / (sobolev_norm(tf.v, n) * sobolev_norm(tf.w, n + 1.0));
}

/// Published closed form for the same ratio:
///   sqrt(2^n / (2 pi)^d |alpha|^2 ((2 - sqrt 2)|beta|^2 + |beta_vec|^2) / ((|alpha|^2 + |alpha_vec|^2)(|beta|^2 + |beta_vec|^2))).
inline double witness_closed_form(int d, double n, Complex alpha, const ComplexVector& alpha_vec, Complex beta,
                                  const ComplexVector& beta_vec)
{
    auto sq = [](const ComplexVector& vec) {
        double s = 0.0;
        for (const auto& x : vec) {
            s += std::norm(x);
        }
        return s;
    };
    const double a2 = std::norm(alpha);
    const double b2 = std::norm(beta);
    const double num = a2 * ((2.0 - std::sqrt(2.0)) * b2 + sq(beta_vec));
    const double den = (a2 + sq(alpha_vec)) * (b2 + sq(beta_vec));
    return std::sqrt(std::pow(2.0, n) / std::pow(2.0 * M_PI, d) * num / den);
}

} // namespace sharpk

#endif // SHARPK_FIELDS_HPP

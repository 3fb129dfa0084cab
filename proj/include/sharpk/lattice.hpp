#ifndef SHARPK_LATTICE_HPP
#define SHARPK_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sharpk/errors.hpp"

namespace sharpk {

using Coord = std::int64_t;

/// Integer point of Z^d.
class LatticeVector {
public:
    LatticeVector() = default;
    explicit LatticeVector(std::vector<Coord> coords) : coords_(std::move(coords)) {}
    LatticeVector(std::initializer_list<Coord> coords) : coords_(coords) {}
    explicit LatticeVector(std::span<const Coord> coords) : coords_(coords.begin(), coords.end()) {}

    static LatticeVector zero(int d) { return LatticeVector(std::vector<Coord>(static_cast<std::size_t>(d), 0)); }

    [[nodiscard]] int dim() const { return static_cast<int>(coords_.size()); }
    [[nodiscard]] Coord operator[](std::size_t i) const { return coords_[i]; }
    Coord& operator[](std::size_t i) { return coords_[i]; }
    [[nodiscard]] std::span<const Coord> coords() const { return coords_; }

    [[nodiscard]] bool is_zero() const
    {
        return std::all_of(coords_.begin(), coords_.end(), [](Coord c) { return c == 0; });
    }

    /// |k|^2, computed in 128-bit arithmetic.  Throws if it does not fit in 53 bits,
    /// the range where every integer is exact as a double.
    [[nodiscard]] std::int64_t norm_sq() const
    {
        __int128 s = 0;
        for (Coord c : coords_) {
            s += static_cast<__int128>(c) * c;
        }
        if (s > (static_cast<__int128>(1) << 53)) {
            throw precondition_error("lattice vector norm exceeds 2^53");
        }
        return static_cast<std::int64_t>(s);
    }

    [[nodiscard]] double norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

    [[nodiscard]] LatticeVector operator-() const
    {
        LatticeVector r = *this;
        for (auto& c : r.coords_) {
            c = -c;
        }
        return r;
    }

    [[nodiscard]] std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (i) {
                s += ",";
            }
            s += std::to_string(coords_[i]);
        }
        return s + ")";
    }

    friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;
    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

private:
    std::vector<Coord> coords_;
};

inline LatticeVector operator+(const LatticeVector& a, const LatticeVector& b)
{
    std::vector<Coord> c(a.coords().begin(), a.coords().end());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] += b[i];
    }
    return LatticeVector(std::move(c));
}

inline LatticeVector operator-(const LatticeVector& a, const LatticeVector& b) { return a + (-b); }

/// Exact membership test "|h| < rho" for integer |h|^2.
///
/// rho*rho is split into an exact (hi, lo) pair with fma, so the comparison
/// m < rho^2 is decided exactly for every finite double rho.  Construction
/// finds the first integer norm outside the ball once; contains() is then a
/// single integer compare.
class Cutoff {
public:
    explicit Cutoff(double rho) : rho_(rho)
    {
        detail::require(std::isfinite(rho) && rho > 0.0, "cutoff radius must be positive and finite");
        detail::require(rho < 9.0e7, "cutoff radius too large for exact norm comparison");
        auto m = static_cast<std::int64_t>(std::floor(rho * rho));
        m = std::max<std::int64_t>(m - 2, 0);
        while (exact_less(m, rho)) {
            ++m;
        }
        first_outside_ = m;
    }

    [[nodiscard]] double rho() const { return rho_; }
    /// Smallest integer m with m >= rho^2.
    [[nodiscard]] std::int64_t first_outside() const { return first_outside_; }
    [[nodiscard]] bool contains(std::int64_t norm_sq) const { return norm_sq < first_outside_; }

    /// m < rho^2 decided exactly (m < 2^53).
    static bool exact_less(std::int64_t m, double rho)
    {
        const double p = rho * rho;
        const double e = std::fma(rho, rho, -p);
        const double diff = static_cast<double>(m) - p;
        return diff < e;
    }

private:
    double rho_;
    std::int64_t first_outside_ = 0;
};

namespace detail {

template <class Fn>
void ball_recurse(std::vector<Coord>& h, std::size_t pos, std::int64_t partial, const Cutoff& cut, Fn& fn)
{
    const std::int64_t budget = cut.first_outside() - 1 - partial; // max allowed h_pos^2
    if (budget < 0) {
        return;
    }
    auto bound = static_cast<Coord>(std::sqrt(static_cast<double>(budget)));
    while (bound * bound > budget) {
        --bound;
    }
    while ((bound + 1) * (bound + 1) <= budget) {
        ++bound;
    }
    for (Coord x = -bound; x <= bound; ++x) {
        h[pos] = x;
        const std::int64_t s = partial + x * x;
        if (pos + 1 == h.size()) {
            if (s != 0) {
                fn(std::span<const Coord>(h), s);
            }
        } else {
            ball_recurse(h, pos + 1, s, cut, fn);
        }
    }
    h[pos] = 0;
}

} // namespace detail

/// Visits every h in Z^d \ {0} with |h| < rho in lexicographic order, calling
/// fn(span<const Coord> h, int64 |h|^2).  Nothing is stored.
template <class Fn>
void for_each_in_ball(int d, double rho, Fn&& fn)
{
    detail::require(d >= 1, "dimension must be positive");
    const Cutoff cut(rho);
    std::vector<Coord> h(static_cast<std::size_t>(d), 0);
    detail::ball_recurse(h, 0, 0, cut, fn);
}

/// Materialized ball { h in Z^d \ {0} : |h| < rho }, lexicographically ordered.
struct BallEnumeration {
    int d = 0;
    double radius = 0.0;
    std::vector<Coord> coords;        ///< flat, d entries per point
    std::vector<std::int64_t> norm_sq;
    std::map<std::int64_t, std::vector<std::size_t>> by_norm_sq;

    [[nodiscard]] std::size_t size() const { return norm_sq.size(); }
    [[nodiscard]] std::span<const Coord> point(std::size_t i) const
    {
        return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
    [[nodiscard]] LatticeVector vector(std::size_t i) const { return LatticeVector(point(i)); }
};

inline constexpr std::size_t kDefaultPointBudget = 20'000'000;

inline BallEnumeration enumerate_ball(int d, double rho, std::size_t max_points = kDefaultPointBudget)
{
    detail::require(d >= 2, "dimension must be at least 2");
    detail::require(rho > 0.0, "ball radius must be positive");

    // Upper estimate of the count from the volume of the ball of radius rho + sqrt(d)/2.
    const double r = rho + 0.5 * std::sqrt(static_cast<double>(d));
    const double volume = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
    if (volume > 4.0 * static_cast<double>(max_points)) {
        throw resource_exhausted("ball of radius " + std::to_string(rho) + " in dimension " + std::to_string(d) +
                                 " exceeds the point budget");
    }

    BallEnumeration ball;
    ball.d = d;
    ball.radius = rho;
    for_each_in_ball(d, rho, [&](std::span<const Coord> h, std::int64_t m) {
        if (ball.norm_sq.size() >= max_points) {
            throw resource_exhausted("ball enumeration exceeds the point budget of " + std::to_string(max_points));
        }
        ball.by_norm_sq[m].push_back(ball.norm_sq.size());
        ball.coords.insert(ball.coords.end(), h.begin(), h.end());
        ball.norm_sq.push_back(m);
    });
    return ball;
}

/// |p|^2 |q|^2 - (p.q)^2, clamped at 0.
inline double wedge_norm_sq(std::span<const double> p, std::span<const double> q)
{
    double pp = 0.0;
    double qq = 0.0;
    double pq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        pp += p[i] * p[i];
        qq += q[i] * q[i];
        pq += p[i] * q[i];
    }
    return std::max(0.0, pp * qq - pq * pq);
}

/// Exact integer version of wedge_norm_sq.
inline __int128 wedge_norm_sq(std::span<const Coord> p, std::span<const Coord> q)
{
    __int128 pp = 0;
    __int128 qq = 0;
    __int128 pq = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        pp += static_cast<__int128>(p[i]) * p[i];
        qq += static_cast<__int128>(q[i]) * q[i];
        pq += static_cast<__int128>(p[i]) * q[i];
    }
    return pp * qq - pq * pq;
}

/// Sorted absolute values, descending.
inline LatticeVector canonical_representative(const LatticeVector& k)
{
    detail::require(!k.is_zero(), "canonical_representative: zero vector");
    std::vector<Coord> c(k.coords().begin(), k.coords().end());
    for (auto& x : c) {
        x = x < 0 ? -x : x;
    }
    std::sort(c.begin(), c.end(), std::greater<>());
    return LatticeVector(std::move(c));
}

inline bool is_canonical(const LatticeVector& k)
{
    if (k.is_zero()) {
        return false;
    }
    for (int i = 0; i < k.dim(); ++i) {
        if (k[i] < 0 || (i > 0 && k[i] > k[i - 1])) {
            return false;
        }
    }
    return true;
}

/// Size of the orbit of a canonical vector under reflections and permutations:
/// d! / prod(multiplicity!) * 2^(number of nonzero coordinates).
inline std::uint64_t orbit_size(const LatticeVector& k)
{
    detail::require(is_canonical(k), "orbit_size: input is not a canonical representative");
    std::uint64_t perms = 1;
    for (int i = 2; i <= k.dim(); ++i) {
        perms *= static_cast<std::uint64_t>(i);
    }
    int run = 1;
    for (int i = 1; i <= k.dim(); ++i) {
        if (i < k.dim() && k[i] == k[i - 1]) {
            ++run;
            continue;
        }
        for (int j = 2; j <= run; ++j) {
            perms /= static_cast<std::uint64_t>(j);
        }
        run = 1;
    }
    for (int i = 0; i < k.dim(); ++i) {
        if (k[i] != 0) {
            perms *= 2;
        }
    }
    return perms;
}

/// All canonical representatives with |k| < radius, in lexicographic order.
inline std::vector<LatticeVector> canonical_representatives(int d, double radius)
{
    detail::require(d >= 2, "dimension must be at least 2");
    const Cutoff cut(radius);
    std::vector<LatticeVector> out;
    std::vector<Coord> k(static_cast<std::size_t>(d), 0);

    auto rec = [&](auto&& self, std::size_t pos, Coord cap, std::int64_t partial) -> void {
        if (pos == k.size()) {
            if (partial != 0) {
                out.emplace_back(k);
            }
            return;
        }
        for (Coord x = 0; x <= cap; ++x) {
            const std::int64_t s = partial + x * x;
            if (!cut.contains(s)) {
                break;
            }
            k[pos] = x;
            self(self, pos + 1, x, s);
        }
        k[pos] = 0;
    };
    const auto top = static_cast<Coord>(std::ceil(radius));
    rec(rec, 0, top, 0);
    return out;
}

} // namespace sharpk

#endif // SHARPK_LATTICE_HPP

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sharpk/certify.hpp"
#include "sharpk/errors.hpp"
#include "sharpk/fields.hpp"
#include "sharpk/sums.hpp"

using namespace sharpk;

namespace {

double norm(const ComplexVector& c)
{
    double s = 0.0;
    for (const auto& x : c) {
        s += std::norm(x);
    }
    return std::sqrt(s);
}

FourierField random_field(std::mt19937_64& rng, int d, int modes, Coord box)
{
    std::uniform_int_distribution<Coord> u(-box, box);
    std::normal_distribution<double> g;
    FourierField f(d);
    while (static_cast<int>(f.size()) < 2 * modes) {
        std::vector<Coord> k(static_cast<std::size_t>(d));
        for (auto& x : k) {
            x = u(rng);
        }
        const LatticeVector kv(k);
        if (kv.is_zero()) {
            continue;
        }
        ComplexVector c(static_cast<std::size_t>(d));
        for (auto& x : c) {
            x = Complex(g(rng), g(rng));
        }
        f.set_mode(kv, c);
    }
    return f;
}

double witness_ratio(double n, const TrialFields& tf)
{
    const FourierField p = leray_project(advect(tf.v, tf.w));
    return sobolev_norm(p, n) / (sobolev_norm(tf.v, n) * sobolev_norm(tf.w, n + 1.0));
}

} // namespace

TEST(Field, ConstructionAndValidation)
{
    FourierField f(3);
    f.set_mode(LatticeVector{1, 0, 0}, {Complex(0, 0), Complex(1, 2), Complex(0, -1)});
    EXPECT_EQ(f.size(), 2U);
    EXPECT_EQ(f.coefficient(LatticeVector{-1, 0, 0})[1], Complex(1, -2));
    EXPECT_EQ(norm(f.coefficient(LatticeVector{0, 1, 0})), 0.0);
    EXPECT_TRUE(f.is_divergence_free());
    EXPECT_THROW(f.set_mode(LatticeVector::zero(3), ComplexVector(3)), precondition_error);
    EXPECT_THROW(f.set_mode(LatticeVector{1, 0}, ComplexVector(2)), precondition_error);

    std::map<LatticeVector, ComplexVector> bad{{LatticeVector{1, 0}, {Complex(1, 0), Complex(0, 1)}}};
    EXPECT_THROW(FourierField(2, bad), precondition_error);
    bad[LatticeVector{-1, 0}] = {Complex(1, 0), Complex(0, 1)};
    EXPECT_THROW(FourierField(2, bad), precondition_error);
    bad[LatticeVector{-1, 0}] = {Complex(1, 0), Complex(0, -1)};
    EXPECT_NO_THROW(FourierField(2, bad));
}

TEST(Leray, Example)
{
    FourierField f(3);
    f.set_mode(LatticeVector{1, 1, 0}, {Complex(1, 0), Complex(0, 0), Complex(0, 0)});
    const ComplexVector p = leray_project(f).coefficient(LatticeVector{1, 1, 0});
    EXPECT_NEAR(std::abs(p[0] - Complex(0.5, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p[1] - Complex(-0.5, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p[2]), 0.0, 1e-15);
}

TEST(Leray, IdempotentContractionDivergenceFree)
{
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 3;
        const FourierField f = random_field(rng, d, 5, 4);
        const FourierField p = leray_project(f);
        const FourierField pp = leray_project(p);
        EXPECT_TRUE(p.is_divergence_free());
        for (const auto& [k, c] : f.coeffs()) {
            const ComplexVector a = p.coefficient(k);
            const ComplexVector b = pp.coefficient(k);
            EXPECT_LE(norm(a), norm(c) * (1 + 1e-15));
            for (std::size_t r = 0; r < a.size(); ++r) {
                EXPECT_NEAR(std::abs(a[r] - b[r]), 0.0, 1e-13 * (1 + norm(c)));
            }
        }
        EXPECT_LE(sobolev_norm(p, 2.0), sobolev_norm(f, 2.0) * (1 + 1e-15));
    }
}

TEST(Advect, SupportAndZeroField)
{
    std::mt19937_64 rng(53);
    const FourierField v = leray_project(random_field(rng, 3, 3, 2));
    const FourierField w = random_field(rng, 3, 3, 2);
    const FourierField a = advect(v, w);
    for (const auto& [k, c] : a.coeffs()) {
        EXPECT_FALSE(k.is_zero());
        bool found = false;
        for (const auto& [h, vh] : v.coeffs()) {
            found = found || w.coeffs().count(k - h) > 0;
        }
        EXPECT_TRUE(found) << k.to_string();
    }
    EXPECT_EQ(advect(FourierField(3), w).size(), 0U);
    EXPECT_EQ(advect(v, FourierField(3)).size(), 0U);
    EXPECT_NO_THROW(a.validate(1e-12));
}

TEST(Advect, DivergenceFreeVelocityHasZeroMean)
{
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 20; ++trial) {
        const FourierField v = leray_project(random_field(rng, 3, 4, 2));
        const FourierField w = random_field(rng, 3, 4, 2);
        EXPECT_LT(norm(advect_mean(v, w)), 1e-12);
    }
}

TEST(Advect, SingleModeFormula)
{
    // v = A e_a + c.c., w = B e_b + c.c.: (v . grad w)_{a+b} = i (2 pi)^(-d/2) (A . b) B
    FourierField v(3);
    FourierField w(3);
    v.set_mode(LatticeVector{1, 0, 0}, {0.0, Complex(2, 1), 0.0});
    w.set_mode(LatticeVector{0, 1, 0}, {0.0, 0.0, Complex(0, 3)});
    const ComplexVector c = advect(v, w).coefficient(LatticeVector{1, 1, 0});
    const Complex expect = Complex(0, 1) / std::pow(2 * M_PI, 1.5) * Complex(2, 1) * Complex(0, 3);
    EXPECT_NEAR(std::abs(c[2] - expect), 0.0, 1e-15);
}

TEST(Sobolev, Norm)
{
    FourierField f(3);
    f.set_mode(LatticeVector{1, 1, 0}, {Complex(1, 0), Complex(0, 1), 0.0});
    EXPECT_NEAR(sobolev_norm(f, 2.0), std::sqrt(2.0 * 4.0 * 2.0), 1e-14);
    EXPECT_NEAR(sobolev_norm(2.0 * f, 2.0), 2 * sobolev_norm(f, 2.0), 1e-14);
    EXPECT_EQ(sobolev_norm(FourierField(3), 2.0), 0.0);
}

TEST(Witness, ClosedFormInHigherDimensions)
{
    for (int d : {3, 4, 5}) {
        for (double n : {2.0, 3.0, 4.5}) {
            ComplexVector av(static_cast<std::size_t>(d - 2));
            ComplexVector bv(static_cast<std::size_t>(d - 2));
            bv[0] = 1.0;
            const double r = lower_bound_witness(d, n, 1.0, av, 0.0, bv);
            EXPECT_NEAR(r, K_minus(d, n), 1e-12 * K_minus(d, n));
            EXPECT_NEAR(r, witness_closed_form(d, n, 1.0, av, 0.0, bv), 1e-12 * r);
        }
    }
    EXPECT_NEAR(lower_bound_witness(3, 2.0, 1.0, {0.0}, 0.0, {1.0}), 0.126987271868482, 1e-13);
}

TEST(Witness, ClosedFormWithoutBeta)
{
    std::mt19937_64 rng(59);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const Complex alpha(g(rng), g(rng));
        const ComplexVector av{Complex(g(rng), g(rng))};
        const ComplexVector bv{Complex(g(rng), g(rng))};
        const double r = lower_bound_witness(3, 3.0, alpha, av, 0.0, bv);
        EXPECT_NEAR(r, witness_closed_form(3, 3.0, alpha, av, 0.0, bv), 1e-12 * r);
    }
}

TEST(Witness, CanonicalAmplitudesAreOptimal)
{
    std::mt19937_64 rng(61);
    std::normal_distribution<double> g;
    for (int d : {2, 3, 4}) {
        const auto m = static_cast<std::size_t>(d - 2);
        const double best_canonical = d == 2 ? lower_bound_witness(2, 3.0, 1.0, {}, 1.0, {})
                                             : lower_bound_witness(d, 3.0, 1.0, ComplexVector(m), 0.0,
                                                                   [&] { ComplexVector b(m); b[0] = 1.0; return b; }());
        for (int trial = 0; trial < 200; ++trial) {
            ComplexVector av(m);
            ComplexVector bv(m);
            for (std::size_t r = 0; r < m; ++r) {
                av[r] = Complex(g(rng), g(rng));
                bv[r] = Complex(g(rng), g(rng));
            }
            const TrialFields tf = trial_fields(d, Complex(g(rng), g(rng)), av, Complex(g(rng), g(rng)), bv);
            EXPECT_LE(witness_ratio(3.0, tf), best_canonical * (1 + 1e-12));
        }
    }
}

// In d = 2 the trial fields give 2^(n/2) / (2 pi) / sqrt 2; the published closed
// form has sqrt(2 - sqrt 2) in place of 1/sqrt 2.
TEST(Witness, TwoDimensionalValue)
{
    for (double n : {2.0, 3.0}) {
        const double r = lower_bound_witness(2, n, 1.0, {}, 1.0, {});
        EXPECT_NEAR(r, std::pow(2.0, n / 2) / (2 * M_PI) / std::sqrt(2.0), 1e-13);
    }
    EXPECT_NEAR(lower_bound_witness(2, 3.0, 1.0, {}, 1.0, {}), 0.318309886, 1e-9);
    EXPECT_THROW((void)lower_bound_witness(2, 3.0, 0.0, {}, 1.0, {}), precondition_error);
    EXPECT_THROW((void)lower_bound_witness(3, 3.0, 1.0, {}, 1.0, {}), precondition_error);
}

TEST(FieldIO, RoundTrip)
{
    std::mt19937_64 rng(67);
    const FourierField f = random_field(rng, 3, 6, 5);
    std::stringstream ss;
    ss << "# header\n\n";
    write_field(ss, f);
    const FourierField g = read_field(ss, 3);
    ASSERT_EQ(g.size(), f.size());
    for (const auto& [k, c] : f.coeffs()) {
        EXPECT_EQ(g.coefficient(k), c);
    }
}

TEST(FieldIO, RejectsBadInput)
{
    std::stringstream dup("1 0 0 1 0\n1 0 0 1 0\n-1 0 1 0 0\n");
    EXPECT_THROW((void)read_field(dup, 2), precondition_error);
    std::stringstream bad("1 0 1 0 x 0\n");
    EXPECT_THROW((void)read_field(bad, 2), precondition_error);
    std::stringstream extra("1 0 1 0 0 0 7\n");
    EXPECT_THROW((void)read_field(extra, 2), precondition_error);
    std::stringstream unreal("1 0 1 0 0 0\n-1 0 1 1 0 0\n");
    EXPECT_THROW((void)read_field(unreal, 2), precondition_error);
}

// |q . z| <= |p ^ q| / |p| |z| whenever p . z = 0.
TEST(Inequalities, OrthogonalProjection)
{
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + trial % 4;
        std::vector<double> p(static_cast<std::size_t>(d));
        std::vector<double> q(p.size());
        ComplexVector z(p.size());
        for (std::size_t r = 0; r < p.size(); ++r) {
            p[r] = g(rng);
            q[r] = g(rng);
            z[r] = Complex(g(rng), g(rng));
        }
        Complex pz = 0.0;
        double pp = 0.0;
        for (std::size_t r = 0; r < p.size(); ++r) {
            pz += p[r] * z[r];
            pp += p[r] * p[r];
        }
        for (std::size_t r = 0; r < p.size(); ++r) {
            z[r] -= pz / pp * p[r];
        }
        Complex qz = 0.0;
        for (std::size_t r = 0; r < p.size(); ++r) {
            qz += q[r] * z[r];
        }
        const double rhs = std::sqrt(wedge_norm_sq(p, q)) / std::sqrt(pp) * norm(z);
        EXPECT_LE(std::abs(qz), rhs * (1 + 1e-12) + 1e-14);
    }
}

// |k|^2n |(v . grad w)_k|^2 <= (2 pi)^-d K(k) sum_h |h|^2n |v_h|^2 |k-h|^(2n+2) |w_{k-h}|^2
TEST(Inequalities, PointwiseChain)
{
    const double n = 3.0;
    const SumConfig cfg(3, n, 6.0);
    std::mt19937_64 rng(73);
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const FourierField v = leray_project(random_field(rng, 3, 6, 3));
        const FourierField w = random_field(rng, 3, 6, 3);
        const FourierField a = advect(v, w);
        for (const auto& [k, c] : a.coeffs()) {
            const double lhs = std::pow(static_cast<double>(k.norm_sq()), n) * std::pow(norm(c), 2);
            const double kk = KK_direct(k, cfg, 2 * (k.norm() + cfg.rho()) + 1).upper;
            const double rhs = kk / std::pow(2 * M_PI, 3.0) * convolution_weight(v, w, k, n);
            ASSERT_LE(lhs, rhs * (1 + 1e-12)) << k.to_string();
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Inequalities, CertifiedUpperBoundHolds)
{
    const BoundCertificate cert = certify_bounds(3, 3.0, 10.0, 6, 20.0);
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const FourierField v = leray_project(random_field(rng, 3, 1 + trial % 6, 1 + trial % 4));
        const FourierField w = random_field(rng, 3, 1 + trial % 5, 1 + trial % 3);
        const double num = sobolev_norm(leray_project(advect(v, w)), 3.0);
        const double den = sobolev_norm(v, 3.0) * sobolev_norm(w, 4.0);
        if (den > 0.0) {
            EXPECT_LE(num, cert.K_plus * den * (1 + 1e-12));
        }
    }
    EXPECT_LE(lower_bound_witness(3, 3.0, 1.0, {0.0}, 0.0, {1.0}), cert.K_plus);
}

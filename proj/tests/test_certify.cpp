#include <gtest/gtest.h>

#include <cmath>

#include "sharpk/certify.hpp"
#include "sharpk/errors.hpp"
#include "sharpk/report.hpp"

using namespace sharpk;

namespace {

const BoundCertificate& cert_n3()
{
    static const BoundCertificate c = certify_bounds(3, 3.0, 10.0, 6, 20.0);
    return c;
}

const BoundCertificate& cert_n4()
{
    static const BoundCertificate c = certify_bounds(3, 4.0, 10.0, 6, 20.0);
    return c;
}

} // namespace

TEST(Rounding, Directed)
{
    EXPECT_EQ(round_up_sig(0.33412).text, "0.335");
    EXPECT_EQ(round_down_sig(0.33412).text, "0.334");
    EXPECT_EQ(round_up_sig(2.871).text, "2.88");
    EXPECT_EQ(round_down_sig(2.0309).text, "2.03");
    EXPECT_EQ(round_up_sig(0.9999).text, "1.00");
    EXPECT_EQ(round_up_sig(123.01).text, "124");
    EXPECT_EQ(round_down_sig(12345.0).text, "12300");
    EXPECT_EQ(round_down_sig(0.0012345, 2).text, "0.0012");
    EXPECT_DOUBLE_EQ(round_up_sig(0.33412).value, 0.335);
    EXPECT_THROW((void)round_up_sig(0.0), precondition_error);
    EXPECT_THROW((void)round_up_sig(1.0, 0), precondition_error);
}

TEST(Rounding, BracketsInput)
{
    for (double x = 0.01; x < 100.0; x *= 1.0137) {
        EXPECT_GE(round_up_sig(x).value, x);
        EXPECT_LE(round_down_sig(x).value, x);
        EXPECT_LE(round_up_sig(x).value - round_down_sig(x).value, x * 0.0101);
    }
}

TEST(KMinus, ClosedForm)
{
    EXPECT_EQ(round_down_sig(K_minus(3, 2.0)).text, "0.126");
    EXPECT_EQ(round_down_sig(K_minus(3, 3.0)).text, "0.179");
    EXPECT_EQ(round_down_sig(K_minus(3, 4.0)).text, "0.253");
    EXPECT_EQ(round_down_sig(K_minus(3, 5.0)).text, "0.359");
    EXPECT_EQ(round_down_sig(K_minus(3, 10.0)).text, "2.03");
    EXPECT_NEAR(K_minus(3, 2.0), 2.0 / std::pow(2 * M_PI, 1.5), 1e-15);
    EXPECT_NEAR(K_minus(2, 2.0), 2.0 * std::sqrt(2 - std::sqrt(2.0)) / (2 * M_PI), 1e-15);
}

TEST(Model, ReferenceBounds)
{
    const SumConfig c2(3, 2.0, 20.0);
    const AsymptoticModel m2 = build_asymptotic_model(c2, 6);
    EXPECT_TRUE(matches_sig4(asymptotic_upper_sup(m2, 40.0), 21.912)) << asymptotic_upper_sup(m2, 40.0);
    const SumConfig c4(3, 4.0, 10.0);
    const AsymptoticModel m4 = build_asymptotic_model(c4, 6);
    EXPECT_TRUE(matches_sig4(asymptotic_upper_sup(m4, 20.0), 9.6152)) << asymptotic_upper_sup(m4, 20.0);
    EXPECT_GE(asymptotic_upper_sup(m4, 20.0), asymptotic_upper(m4, 20.0));
    EXPECT_LE(asymptotic_lower(m4, 20.0), asymptotic_upper(m4, 20.0));
    EXPECT_THROW((void)asymptotic_upper(m4, 19.0), precondition_error);
}

TEST(Model, SupDominatesFurtherOut)
{
    const SumConfig c(3, 3.0, 6.0);
    const AsymptoticModel m = build_asymptotic_model(c, 6);
    const double s = asymptotic_upper_sup(m, 12.0);
    for (double r = 12.0; r < 200.0; r *= 1.07) {
        EXPECT_LE(asymptotic_upper(m, r), s);
    }
}

TEST(Certify, OrderThree)
{
    const BoundCertificate& c = cert_n3();
    EXPECT_TRUE(matches_sig4(c.sup_Km, 25.301));
    EXPECT_EQ(c.argmax, (LatticeVector{2, 1, 1}));
    EXPECT_TRUE(matches_sig4(c.delta_K, 0.45295));
    EXPECT_EQ(c.K_plus_rounded.text, "0.323");
    EXPECT_EQ(c.K_minus_rounded.text, "0.179");
    EXPECT_EQ(rounded_ratio(c).text, "0.554");
    EXPECT_TRUE(check_against_golden(c).ok());
}

TEST(Certify, OrderFour)
{
    const BoundCertificate& c = cert_n4();
    EXPECT_TRUE(matches_sig4(c.sup_Km, 48.038));
    EXPECT_EQ(c.argmax, (LatticeVector{2, 1, 0}));
    EXPECT_EQ(c.K_plus_rounded.text, "0.441");
    EXPECT_EQ(c.K_minus_rounded.text, "0.253");
    EXPECT_TRUE(check_against_golden(c).ok());
}

TEST(Certify, EnclosureInvariants)
{
    for (const BoundCertificate* c : {&cert_n3(), &cert_n4()}) {
        EXPECT_EQ(c->sup_KK.lower, c->sup_Km);
        EXPECT_EQ(c->sup_KK.upper, c->sup_Km + c->delta_K);
        EXPECT_NEAR(c->sup_KK.width(), c->delta_K, 1e-12 * c->sup_Km);
        EXPECT_GE(c->sup_Km, c->asymptotic_bound);
        EXPECT_GE(c->K_plus_rounded.value, c->K_plus);
        EXPECT_LE(c->K_minus_rounded.value, c->K_minus);
        EXPECT_LT(c->K_minus, c->K_plus);
        double best = 0.0;
        for (const auto& s : c->shells) {
            best = std::max(best, s.max);
            EXPECT_LE(s.min, s.max);
        }
        EXPECT_EQ(best, c->sup_Km);
    }
}

TEST(Certify, Inconclusive)
{
    try {
        (void)certify_bounds(3, 2.0, 4.0, 2, 8.0);
        FAIL() << "expected inconclusive_search";
    } catch (const inconclusive_search& e) {
        EXPECT_NE(std::string(e.what()).find("inconclusive search radius"), std::string::npos);
    }
}

TEST(Certify, Preconditions)
{
    EXPECT_THROW((void)certify_bounds(3, 3.0, 6.0, 5, 12.0), precondition_error);
    EXPECT_THROW((void)certify_bounds(3, 3.0, 6.0, 6, 11.0), precondition_error);
    EXPECT_THROW((void)certify_bounds(3, 1.0, 6.0, 6, 12.0), precondition_error);
}

TEST(Certify, ThreadCountDoesNotChangeResult)
{
    CertifyOptions one;
    one.threads = 1;
    CertifyOptions four;
    four.threads = 4;
    const auto a = certify_bounds(3, 3.0, 6.0, 6, 12.0, one);
    const auto b = certify_bounds(3, 3.0, 6.0, 6, 12.0, four);
    EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
}

TEST(Certify, ArgmaxStableUnderLargerRadius)
{
    const SumConfig c(3, 2.0, 8.0);
    const SearchResult a = search_sup_Km(c, 16.0);
    const SearchResult b = search_sup_Km(c, 24.0);
    EXPECT_EQ(a.argmax, b.argmax);
    EXPECT_EQ(a.max, b.max);
}

TEST(Search, TieBreakPrefersLexicographicallySmaller)
{
    EXPECT_TRUE(detail::better_max(2.0, LatticeVector{1, 0, 0}, 1.0, LatticeVector{0, 0, 1}));
    EXPECT_TRUE(detail::better_max(1.0, LatticeVector{1, 0, 0}, 1.0, LatticeVector{2, 0, 0}));
    EXPECT_FALSE(detail::better_max(1.0, LatticeVector{2, 0, 0}, 1.0, LatticeVector{1, 0, 0}));
    EXPECT_TRUE(detail::better_min(1.0, LatticeVector{1, 0, 0}, 1.0, LatticeVector{2, 0, 0}));
}

TEST(Report, JsonRoundTrip)
{
    const BoundCertificate& c = cert_n3();
    const json j = to_json(c);
    const BoundCertificate back = certificate_from_json(json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    for (const char* key : {"d", "n", "rho", "t", "search_radius", "sup_km", "argmax", "sup_kk_lower", "sup_kk_upper",
                            "delta_k", "z_n", "asymptotic_bound", "k_plus", "k_minus", "model", "shells"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_FALSE(to_json(c, false).contains("runtime_ms"));
}

TEST(Report, CsvRowMatchesHeader)
{
    const std::string head = csv_header();
    const std::string row = csv_row(cert_n3());
    auto fields = [](const std::string& s) {
        int n = 1;
        bool quoted = false;
        for (char ch : s) {
            quoted = ch == '"' ? !quoted : quoted;
            n += ch == ',' && !quoted;
        }
        return n;
    };
    EXPECT_EQ(fields(head), fields(row));
}

TEST(Report, GoldenCheckRequiresMatchingConfiguration)
{
    BoundCertificate c = cert_n3();
    c.rho = 12.0;
    EXPECT_FALSE(check_against_golden(c).has_golden);
    c = cert_n3();
    c.K_plus_rounded.text = "0.324";
    EXPECT_FALSE(check_against_golden(c).ok());
}

#ifndef SHARPK_REPORT_HPP
#define SHARPK_REPORT_HPP

// Serialization of certificates (JSON, CSV, plain text) and the reference
// table of published d = 3 values.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sharpk/certify.hpp"

namespace sharpk {

using json = nlohmann::json;

namespace detail {

inline json vec_json(const LatticeVector& k) { return json(std::vector<Coord>(k.coords().begin(), k.coords().end())); }

inline LatticeVector vec_from(const json& j) { return LatticeVector(j.get<std::vector<Coord>>()); }

inline std::string fmt(double x, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

} // namespace detail

/// Full certificate as JSON.  k_plus / k_minus are the directed 3-digit
/// decimals; k_plus_full / k_minus_full keep full precision.
inline json to_json(const BoundCertificate& c, bool include_runtime = true)
{
    json j;
    j["d"] = c.d;
    j["n"] = c.n;
    j["rho"] = c.rho;
    j["t"] = c.t;
    j["search_radius"] = c.search_radius;
    j["sup_km"] = c.sup_Km;
    j["argmax"] = detail::vec_json(c.argmax);
    j["sup_kk_lower"] = c.sup_KK.lower;
    j["sup_kk_upper"] = c.sup_KK.upper;
    j["delta_k"] = c.delta_K;
    j["z_n"] = c.Z_n;
    j["asymptotic_bound"] = c.asymptotic_bound;
    j["k_plus"] = c.K_plus_rounded.value;
    j["k_minus"] = c.K_minus_rounded.value;
    j["k_plus_text"] = c.K_plus_rounded.text;
    j["k_minus_text"] = c.K_minus_rounded.text;
    j["k_plus_full"] = c.K_plus;
    j["k_minus_full"] = c.K_minus;
    j["evaluated"] = c.evaluated;

    const auto& m = c.model;
    json model;
    model["z_lower"] = m.Z_lower;
    model["z_upper"] = m.Z_upper;
    model["v"] = m.v;
    model["V"] = m.V;
    json terms = json::array();
    for (const auto& t : m.terms) {
        terms.push_back({{"ell", t.ell},
                         {"q_min", {t.q_min.lower, t.q_min.upper}},
                         {"Q_max", {t.Q_max.lower, t.Q_max.upper}},
                         {"argmax", t.argmax}});
    }
    model["terms"] = terms;
    const auto& r = m.remainder;
    model["remainder"] = {{"mu", r.mu},
                          {"mu_attained", r.mu_attained},
                          {"M", r.M},
                          {"M_attained", r.M_attained},
                          {"argmin", {r.argmin.first, r.argmin.second}},
                          {"argmax", {r.argmax.first, r.argmax.second}},
                          {"grid_resolution", r.grid_resolution},
                          {"margin", r.margin},
                          {"refinement_levels", r.refinement_levels}};
    j["model"] = model;

    json shells = json::array();
    for (const auto& s : c.shells) {
        shells.push_back({{"shell", s.shell},
                          {"count", s.count},
                          {"max", s.max},
                          {"argmax", detail::vec_json(s.argmax)},
                          {"min", s.min},
                          {"argmin", detail::vec_json(s.argmin)}});
    }
    j["shells"] = shells;
    if (include_runtime) {
        j["runtime_ms"] = c.runtime_ms;
    }
    return j;
}

inline BoundCertificate certificate_from_json(const json& j)
{
    BoundCertificate c;
    c.d = j.at("d").get<int>();
    c.n = j.at("n").get<double>();
    c.rho = j.at("rho").get<double>();
    c.t = j.at("t").get<int>();
    c.search_radius = j.at("search_radius").get<double>();
    c.sup_Km = j.at("sup_km").get<double>();
    c.argmax = detail::vec_from(j.at("argmax"));
    c.sup_KK = {j.at("sup_kk_lower").get<double>(), j.at("sup_kk_upper").get<double>()};
    c.delta_K = j.at("delta_k").get<double>();
    c.Z_n = j.at("z_n").get<double>();
    c.asymptotic_bound = j.at("asymptotic_bound").get<double>();
    c.K_plus_rounded = {j.at("k_plus").get<double>(), j.at("k_plus_text").get<std::string>()};
    c.K_minus_rounded = {j.at("k_minus").get<double>(), j.at("k_minus_text").get<std::string>()};
    c.K_plus = j.at("k_plus_full").get<double>();
    c.K_minus = j.at("k_minus_full").get<double>();
    c.evaluated = j.at("evaluated").get<std::size_t>();

    const json& model = j.at("model");
    auto& m = c.model;
    m.d = c.d;
    m.n = c.n;
    m.rho = c.rho;
    m.t = c.t;
    m.Z_lower = model.at("z_lower").get<double>();
    m.Z_upper = model.at("z_upper").get<double>();
    m.v = model.at("v").get<double>();
    m.V = model.at("V").get<double>();
    for (const auto& t : model.at("terms")) {
        ExpansionTerm e;
        e.ell = t.at("ell").get<int>();
        e.q_min = {t.at("q_min").at(0).get<double>(), t.at("q_min").at(1).get<double>()};
        e.Q_max = {t.at("Q_max").at(0).get<double>(), t.at("Q_max").at(1).get<double>()};
        e.argmax = t.at("argmax").get<std::vector<double>>();
        m.terms.push_back(std::move(e));
    }
    const json& r = model.at("remainder");
    m.remainder.mu = r.at("mu").get<double>();
    m.remainder.mu_attained = r.at("mu_attained").get<double>();
    m.remainder.M = r.at("M").get<double>();
    m.remainder.M_attained = r.at("M_attained").get<double>();
    m.remainder.argmin = {r.at("argmin").at(0).get<double>(), r.at("argmin").at(1).get<double>()};
    m.remainder.argmax = {r.at("argmax").at(0).get<double>(), r.at("argmax").at(1).get<double>()};
    m.remainder.grid_resolution = r.at("grid_resolution").get<int>();
    m.remainder.margin = r.at("margin").get<double>();
    m.remainder.refinement_levels = r.at("refinement_levels").get<int>();

    for (const auto& s : j.at("shells")) {
        ShellStats st;
        st.shell = s.at("shell").get<int>();
        st.count = s.at("count").get<std::size_t>();
        st.max = s.at("max").get<double>();
        st.argmax = detail::vec_from(s.at("argmax"));
        st.min = s.at("min").get<double>();
        st.argmin = detail::vec_from(s.at("argmin"));
        c.shells.push_back(std::move(st));
    }
    c.runtime_ms = j.value("runtime_ms", 0.0);
    return c;
}

inline const char* csv_header()
{
    return "d,n,rho,t,search_radius,sup_km,argmax,sup_kk_lower,sup_kk_upper,delta_k,z_n,asymptotic_bound,"
           "k_plus,k_minus,k_plus_full,k_minus_full,runtime_ms";
}

inline std::string csv_row(const BoundCertificate& c)
{
    std::ostringstream os;
    os.precision(17);
    os << c.d << ',' << c.n << ',' << c.rho << ',' << c.t << ',' << c.search_radius << ',' << c.sup_Km << ",\""
       << c.argmax.to_string() << "\"," << c.sup_KK.lower << ',' << c.sup_KK.upper << ',' << c.delta_K << ','
       << c.Z_n << ',' << c.asymptotic_bound << ',' << c.K_plus_rounded.text << ',' << c.K_minus_rounded.text << ','
       << c.K_plus << ',' << c.K_minus << ',' << c.runtime_ms;
    return os.str();
}

/// Plain-text summary of one certificate.
inline void write_human(std::ostream& os, const BoundCertificate& c, bool verbose = false)
{
    os << "d = " << c.d << ", n = " << detail::fmt(c.n) << ", rho = " << detail::fmt(c.rho) << ", t = " << c.t
       << ", search radius = " << detail::fmt(c.search_radius) << '\n';
    os << "  sup K_m          = " << detail::fmt(c.sup_Km, 8) << " at " << c.argmax.to_string() << " ("
       << c.evaluated << " canonical vectors)\n";
    os << "  outer-region bound <= " << detail::fmt(c.asymptotic_bound, 8) << '\n';
    os << "  delta_K          = " << detail::fmt(c.delta_K, 6) << '\n';
    os << "  sup K in         [" << detail::fmt(c.sup_KK.lower, 8) << ", " << detail::fmt(c.sup_KK.upper, 8)
       << "]\n";
    os << "  K+ = " << c.K_plus_rounded.text << "  (" << detail::fmt(c.K_plus, 10) << ")\n";
    os << "  K- = " << c.K_minus_rounded.text << "  (" << detail::fmt(c.K_minus, 10) << ")\n";
    if (verbose) {
        const auto& m = c.model;
        os << "  model: Z in [" << detail::fmt(m.Z_lower, 10) << ", " << detail::fmt(m.Z_upper, 10) << "]\n";
        for (const auto& t : m.terms) {
            os << "    l = " << t.ell << ": min Q in [" << detail::fmt(t.q_min.lower, 8) << ", "
               << detail::fmt(t.q_min.upper, 8) << "], max Q in [" << detail::fmt(t.Q_max.lower, 8) << ", "
               << detail::fmt(t.Q_max.upper, 8) << "]\n";
        }
        os << "    remainder: mu in [" << detail::fmt(m.remainder.mu, 8) << ", "
           << detail::fmt(m.remainder.mu_attained, 8) << "], M in [" << detail::fmt(m.remainder.M_attained, 8)
           << ", " << detail::fmt(m.remainder.M, 8) << "]\n";
        os << "    v = " << detail::fmt(m.v, 8) << ", V = " << detail::fmt(m.V, 8) << '\n';
        os << "  shells (|k| in [s, s+1)):\n";
        for (const auto& s : c.shells) {
            os << "    " << s.shell << ": max " << detail::fmt(s.max, 8) << " at " << s.argmax.to_string() << ", min "
               << detail::fmt(s.min, 8) << " at " << s.argmin.to_string() << '\n';
        }
    }
    os << "  runtime " << detail::fmt(c.runtime_ms, 4) << " ms\n";
}

/// Published d = 3 values, t = 6, search radius 2 rho.
struct GoldenRow {
    double n = 0.0;
    double rho = 0.0;
    std::string k_minus;
    std::string k_plus;
    std::string ratio;
    double sup_km = 0.0;
    LatticeVector argmax;
    double delta_k = 0.0;
    std::string source;
};

inline const std::vector<GoldenRow>& golden_table()
{
    static const std::vector<GoldenRow> rows = {
        {2, 20, "0.126", "0.335", "0.376", 22.022, {9, 9, 9}, 5.6856, "reference table, n = 2"},
        {3, 10, "0.179", "0.323", "0.554", 25.301, {2, 1, 1}, 0.45295, "reference table, n = 3"},
        {4, 10, "0.253", "0.441", "0.573", 48.038, {2, 1, 0}, 0.021561, "reference table, n = 4"},
        {5, 10, "0.359", "0.510", "0.703", 64.455, {1, 1, 0}, 0.0012414, "reference table, n = 5"},
        {10, 10, "2.03", "2.88", "0.704", 2048.0, {1, 1, 0}, 2.1401e-9, "reference table, n = 10"},
    };
    return rows;
}

inline std::optional<GoldenRow> golden_row(int d, double n)
{
    if (d != 3) {
        return std::nullopt;
    }
    for (const auto& r : golden_table()) {
        if (r.n == n) {
            return r;
        }
    }
    return std::nullopt;
}

/// |x - p| < one unit in the 4th significant digit of p: published values are
/// truncated decimals.
inline bool matches_sig4(double x, double p)
{
    const double unit = std::pow(10.0, std::floor(std::log10(std::fabs(p))) - 3.0);
    return std::fabs(x - p) < unit;
}

/// K-/K+ from the rounded decimals, truncated to 3 significant digits.
inline RoundedDecimal rounded_ratio(const BoundCertificate& c)
{
    return round_down_sig(c.K_minus_rounded.value / c.K_plus_rounded.value, 3);
}

struct TableCheck {
    bool has_golden = false;
    bool k_minus = true;
    bool k_plus = true;
    bool ratio = true;
    bool sup_km = true;
    bool argmax = true;
    bool delta_k = true;

    [[nodiscard]] bool ok() const { return k_minus && k_plus && ratio && sup_km && argmax && delta_k; }
};

inline TableCheck check_against_golden(const BoundCertificate& c)
{
    TableCheck t;
    const auto g = golden_row(c.d, c.n);
    if (!g || c.rho != g->rho || c.t != 6) {
        return t;
    }
    t.has_golden = true;
    t.k_minus = c.K_minus_rounded.text == g->k_minus;
    t.k_plus = c.K_plus_rounded.text == g->k_plus;
    t.ratio = rounded_ratio(c).text == g->ratio;
    t.sup_km = matches_sig4(c.sup_Km, g->sup_km);
    t.argmax = c.argmax == g->argmax;
    t.delta_k = matches_sig4(c.delta_K, g->delta_k);
    return t;
}

/// Table in the published layout; '*' marks a value that differs from the
/// reference, with the reference in brackets.
inline void write_table_human(std::ostream& os, const std::vector<BoundCertificate>& certs)
{
    if (certs.empty()) {
        return;
    }
    auto cell = [](const std::string& s) {
        std::string r = s;
        if (r.size() < 14) {
            r.insert(0, 14 - r.size(), ' ');
        }
        return r;
    };
    auto mark = [](const std::string& value, bool ok, bool has, const std::string& expected) {
        return ok || !has ? value : value + "*[" + expected + "]";
    };
    os << "d = " << certs.front().d << '\n';
    std::string n_line = "  n      ";
    std::string km = "  K-     ";
    std::string kp = "  K+     ";
    std::string ra = "  K-/K+  ";
    std::string sup = "  supKm  ";
    std::string arg = "  argmax ";
    std::string dk = "  dK     ";
    for (const auto& c : certs) {
        const TableCheck t = check_against_golden(c);
        const auto g = golden_row(c.d, c.n);
        const GoldenRow ref = g.value_or(GoldenRow{});
        n_line += cell(detail::fmt(c.n));
        km += cell(mark(c.K_minus_rounded.text, t.k_minus, t.has_golden, ref.k_minus));
        kp += cell(mark(c.K_plus_rounded.text, t.k_plus, t.has_golden, ref.k_plus));
        ra += cell(mark(rounded_ratio(c).text, t.ratio, t.has_golden, ref.ratio));
        sup += cell(mark(detail::fmt(c.sup_Km, 5), t.sup_km, t.has_golden, detail::fmt(ref.sup_km, 5)));
        arg += cell(mark(c.argmax.to_string(), t.argmax, t.has_golden, ref.argmax.to_string()));
        dk += cell(mark(detail::fmt(c.delta_K, 5), t.delta_k, t.has_golden, detail::fmt(ref.delta_k, 5)));
    }
    for (const auto* line : {&n_line, &km, &kp, &ra, &sup, &arg, &dk}) {
        os << *line << '\n';
    }
}

inline const char* table_csv_header()
{
    return "n,rho,k_minus,k_plus,ratio,sup_km,argmax,delta_k,expected_k_minus,expected_k_plus,expected_ratio,"
           "expected_sup_km,expected_argmax,expected_delta_k,status";
}

inline std::string table_csv_row(const BoundCertificate& c)
{
    const TableCheck t = check_against_golden(c);
    const auto g = golden_row(c.d, c.n);
    std::ostringstream os;
    os.precision(10);
    os << c.n << ',' << c.rho << ',' << c.K_minus_rounded.text << ',' << c.K_plus_rounded.text << ','
       << rounded_ratio(c).text << ',' << c.sup_Km << ",\"" << c.argmax.to_string() << "\"," << c.delta_K << ',';
    if (t.has_golden) {
        os << g->k_minus << ',' << g->k_plus << ',' << g->ratio << ',' << g->sup_km << ",\"" << g->argmax.to_string()
           << "\"," << g->delta_k << ',' << (t.ok() ? "match" : "mismatch");
    } else {
        os << ",,,,,,no-reference";
    }
    return os.str();
}

inline json table_json(const std::vector<BoundCertificate>& certs)
{
    json rows = json::array();
    bool all = true;
    for (const auto& c : certs) {
        const TableCheck t = check_against_golden(c);
        json row = to_json(c);
        row["ratio"] = rounded_ratio(c).text;
        if (t.has_golden) {
            const auto g = golden_row(c.d, c.n);
            row["expected"] = {{"k_minus", g->k_minus},     {"k_plus", g->k_plus},
                               {"ratio", g->ratio},         {"sup_km", g->sup_km},
                               {"argmax", detail::vec_json(g->argmax)}, {"delta_k", g->delta_k},
                               {"source", g->source}};
            row["checks"] = {{"k_minus", t.k_minus}, {"k_plus", t.k_plus}, {"ratio", t.ratio},
                             {"sup_km", t.sup_km},   {"argmax", t.argmax}, {"delta_k", t.delta_k}};
            row["match"] = t.ok();
            all = all && t.ok();
        }
        rows.push_back(std::move(row));
    }
    return {{"rows", rows}, {"all_match", all}};
}

} // namespace sharpk

#endif // SHARPK_REPORT_HPP

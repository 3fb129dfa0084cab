#ifndef SHARPK_CLI_HPP
#define SHARPK_CLI_HPP

// Command-line front end.  run() parses arguments, writes the report to the
// given streams and returns the process exit status:
//   0 success, 1 invalid parameters or failed computation,
//   2 inconclusive search radius, 3 table values differ from the reference.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sharpk/certify.hpp"
#include "sharpk/errors.hpp"
#include "sharpk/fields.hpp"
#include "sharpk/report.hpp"
#include "sharpk/sums.hpp"
#include "sharpk/tail.hpp"

namespace sharpk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitMismatch = 3;

struct RunConfig {
    std::string subcommand;
    int d = 3;
    std::vector<double> n;
    std::optional<double> rho;
    int t = 6;
    std::optional<double> search_radius;
    std::string format = "human";
    std::string out_path;
    unsigned threads = 0;
    bool verbose = false;

    // witness
    std::string alpha;
    std::string alpha_vec;
    std::string beta;
    std::string beta_vec;
    bool canonical = false;
    std::string fields_path;

    // sums
    std::vector<Coord> k;
    std::optional<double> truncation;
};

/// rho = 20 for d = 3, n = 2 and 10 otherwise.
inline double default_rho(int d, double n) { return d == 3 && n == 2.0 ? 20.0 : 10.0; }

inline double rho_for(const RunConfig& cfg, double n) { return cfg.rho.value_or(default_rho(cfg.d, n)); }

inline double radius_for(const RunConfig& cfg, double n) { return cfg.search_radius.value_or(2.0 * rho_for(cfg, n)); }

/// "x" or "x:y" for x + i y.
inline Complex parse_complex(const std::string& s)
{
    const auto colon = s.find(':');
    try {
        std::size_t used = 0;
        if (colon == std::string::npos) {
            const double re = std::stod(s, &used);
            detail::require(used == s.size(), "");
            return {re, 0.0};
        }
        const std::string a = s.substr(0, colon);
        const std::string b = s.substr(colon + 1);
        const double re = std::stod(a, &used);
        detail::require(used == a.size(), "");
        const double im = std::stod(b, &used);
        detail::require(used == b.size(), "");
        return {re, im};
    } catch (const std::exception&) {
        throw precondition_error("cannot parse complex amplitude '" + s + "' (use x or x:y)");
    }
}

inline ComplexVector parse_complex_list(const std::string& s)
{
    ComplexVector out;
    if (s.empty()) {
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_complex(item));
    }
    return out;
}

namespace detail {

struct Output {
    std::ofstream file;
    std::ostream* stream = nullptr;

    Output(const std::string& path, std::ostream& fallback)
    {
        if (path.empty()) {
            stream = &fallback;
            return;
        }
        file.open(path);
        sharpk::detail::require(file.good(), "cannot open output file " + path);
        stream = &file;
    }
    std::ostream& operator*() { return *stream; }
};

inline void require_format(const RunConfig& cfg)
{
    sharpk::detail::require(cfg.format == "human" || cfg.format == "json" || cfg.format == "csv",
                            "--format must be human, json or csv");
}

inline std::vector<BoundCertificate> certify_all(const RunConfig& cfg, std::ostream& err)
{
    std::vector<BoundCertificate> certs;
    CertifyOptions opt;
    opt.threads = cfg.threads;
    for (double n : cfg.n) {
        if (cfg.verbose) {
            err << "certifying d = " << cfg.d << ", n = " << n << ", rho = " << rho_for(cfg, n)
                << ", search radius = " << radius_for(cfg, n) << '\n';
        }
        certs.push_back(certify_bounds(cfg.d, n, rho_for(cfg, n), cfg.t, radius_for(cfg, n), opt));
    }
    return certs;
}

} // namespace detail

inline int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    detail::require_format(cfg);
    sharpk::detail::require(!cfg.n.empty(), "--n is required");
    const auto certs = detail::certify_all(cfg, err);
    detail::Output o(cfg.out_path, out);
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& c : certs) {
            arr.push_back(to_json(c));
        }
        *o << arr.dump(2) << '\n';
    } else if (cfg.format == "csv") {
        *o << csv_header() << '\n';
        for (const auto& c : certs) {
            *o << csv_row(c) << '\n';
        }
    } else {
        for (const auto& c : certs) {
            write_human(*o, c, cfg.verbose);
        }
    }
    return kExitOk;
}

inline int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    detail::require_format(cfg);
    RunConfig c = cfg;
    if (c.n.empty()) {
        c.n = {2, 3, 4, 5, 10};
    }
    const auto certs = detail::certify_all(c, err);
    bool all = true;
    for (const auto& cert : certs) {
        all = all && check_against_golden(cert).ok();
    }
    detail::Output o(c.out_path, out);
    if (c.format == "json") {
        *o << table_json(certs).dump(2) << '\n';
    } else if (c.format == "csv") {
        *o << table_csv_header() << '\n';
        for (const auto& cert : certs) {
            *o << table_csv_row(cert) << '\n';
        }
    } else {
        write_table_human(*o, certs);
        if (!all) {
            *o << "* differs from the reference value shown in brackets\n";
        }
    }
    if (!all) {
        err << "table: some values differ from the reference\n";
        return kExitMismatch;
    }
    return kExitOk;
}

inline int cmd_witness(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/)
{
    detail::require_format(cfg);
    sharpk::detail::require(cfg.n.size() == 1, "witness takes a single --n");
    const int d = cfg.d;
    sharpk::detail::require(d >= 2, "--d must be at least 2");
    const double n = cfg.n.front();

    // Canonical amplitudes: alpha = 1, beta_vec = e_1 (d >= 3); alpha = beta = 1 (d = 2).
    Complex alpha = 1.0;
    ComplexVector alpha_vec(static_cast<std::size_t>(d - 2));
    Complex beta = d == 2 ? 1.0 : 0.0;
    ComplexVector beta_vec(static_cast<std::size_t>(d - 2));
    if (d >= 3) {
        beta_vec[0] = 1.0;
    }
    if (!cfg.canonical) {
        if (!cfg.alpha.empty()) {
            alpha = parse_complex(cfg.alpha);
        }
        if (!cfg.alpha_vec.empty()) {
            alpha_vec = parse_complex_list(cfg.alpha_vec);
        }
        if (!cfg.beta.empty()) {
            beta = parse_complex(cfg.beta);
        }
        if (!cfg.beta_vec.empty()) {
            beta_vec = parse_complex_list(cfg.beta_vec);
        }
    }
    const double ratio = lower_bound_witness(d, n, alpha, alpha_vec, beta, beta_vec);
    const double closed = witness_closed_form(d, n, alpha, alpha_vec, beta, beta_vec);
    const double rel = std::fabs(ratio - closed) / closed;

    if (!cfg.fields_path.empty()) {
        const TrialFields tf = trial_fields(d, alpha, alpha_vec, beta, beta_vec);
        std::ofstream f(cfg.fields_path);
        sharpk::detail::require(f.good(), "cannot open " + cfg.fields_path);
        f << "# v\n";
        write_field(f, tf.v);
        f << "# w\n";
        write_field(f, tf.w);
        f << "# projected advection\n";
        write_field(f, leray_project(advect(tf.v, tf.w)));
    }

    detail::Output o(cfg.out_path, out);
    if (cfg.format == "json") {
        json j = {{"d", d}, {"n", n}, {"ratio", ratio}, {"closed_form", closed}, {"relative_difference", rel},
                  {"k_minus", K_minus(d, n)}};
        *o << j.dump(2) << '\n';
    } else if (cfg.format == "csv") {
        std::ostringstream row;
        row.precision(17);
        row << d << ',' << n << ',' << ratio << ',' << closed << ',' << rel << ',' << K_minus(d, n);
        *o << "d,n,ratio,closed_form,relative_difference,k_minus\n" << row.str() << '\n';
    } else {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "trial-field ratio    %.15g\nclosed form          %.15g\nrelative difference  %.3g\n"
                      "K- (closed form)     %.15g\n",
                      ratio, closed, rel, K_minus(d, n));
        *o << buf;
    }
    return kExitOk;
}

inline int cmd_sums(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/)
{
    detail::require_format(cfg);
    sharpk::detail::require(cfg.n.size() == 1, "sums takes a single --n");
    const double n = cfg.n.front();
    const double rho = rho_for(cfg, n);
    const SumConfig sc(cfg.d, n, rho);
    const double z = Z_n(sc);
    const double dk = delta_K(cfg.d, n, rho);

    nlohmann::ordered_json j = {{"d", cfg.d}, {"n", n}, {"rho", rho}, {"z_n", z}, {"delta_k", dk}};
    if (!cfg.k.empty()) {
        const LatticeVector k(cfg.k);
        sharpk::detail::require(k.dim() == cfg.d, "--k must have d components");
        const double km = K_m(k, sc);
        const double trunc = cfg.truncation.value_or(2.0 * (k.norm() + rho) + 1.0);
        const Interval kk = KK_direct(k, sc, trunc);
        j["k"] = sharpk::detail::vec_json(k);
        j["canonical"] = sharpk::detail::vec_json(canonical_representative(k));
        j["k_m"] = km;
        j["truncation_radius"] = trunc;
        j["kk_lower"] = kk.lower;
        j["kk_upper"] = kk.upper;
    }

    detail::Output o(cfg.out_path, out);
    if (cfg.format == "json") {
        *o << j.dump(2) << '\n';
    } else if (cfg.format == "csv") {
        std::string head;
        std::string row;
        for (const auto& [key, val] : j.items()) {
            head += (head.empty() ? "" : ",") + key;
            row += (row.empty() ? "" : ",") + (val.is_array() ? "\"" + val.dump() + "\"" : val.dump());
        }
        *o << head << '\n' << row << '\n';
    } else {
        char buf[512];
        std::snprintf(buf, sizeof buf, "d = %d, n = %g, rho = %g\n  Z_n     = %.12g\n  delta_K = %.12g\n", cfg.d, n,
                      rho, z, dk);
        *o << buf;
        if (j.contains("k_m")) {
            std::snprintf(buf, sizeof buf, "  k = %s\n  K_m(k)  = %.15g\n  K(k) in [%.15g, %.15g] (|h| < %g)\n",
                          LatticeVector(cfg.k).to_string().c_str(), j["k_m"].get<double>(),
                          j["kk_lower"].get<double>(), j["kk_upper"].get<double>(),
                          j["truncation_radius"].get<double>());
            *o << buf;
        }
    }
    return kExitOk;
}

/// Parses argv and dispatches.  argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Certified bounds on the sharp Sobolev constant of the advection term", "sharpk"};
    app.require_subcommand(1);
    RunConfig cfg;
    double rho = 0.0;
    double radius = 0.0;
    double truncation = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--d", cfg.d, "Dimension")->capture_default_str();
        sub->add_option("--n", cfg.n, "Sobolev order(s), comma separated")->delimiter(',');
        sub->add_option("--rho", rho, "Cutoff radius (default 10; 20 for d = 3, n = 2)");
        sub->add_option("--format", cfg.format, "human, json or csv")->capture_default_str();
        sub->add_option("--out", cfg.out_path, "Write the report to a file");
        sub->add_flag("--verbose,-v", cfg.verbose, "Progress and diagnostics");
    };
    auto certifying = [&](CLI::App* sub) {
        sub->add_option("--t", cfg.t, "Taylor order of the remainder")->capture_default_str();
        sub->add_option("--search-radius", radius, "Search radius (default 2 rho)");
        sub->add_option("--threads", cfg.threads, "Worker threads (0: $SHARPK_THREADS or all cores)");
    };

    CLI::App* certify = app.add_subcommand("certify", "Certify K+ and K- for the given orders");
    common(certify);
    certifying(certify);
    CLI::App* table = app.add_subcommand("table", "Reproduce the d = 3 reference table");
    common(table);
    certifying(table);
    CLI::App* witness = app.add_subcommand("witness", "Evaluate the trial-field lower bound");
    common(witness);
    witness->add_option("--alpha", cfg.alpha, "alpha (x or x:y)");
    witness->add_option("--alpha-vec", cfg.alpha_vec, "alpha_vec, d-2 comma-separated amplitudes");
    witness->add_option("--beta", cfg.beta, "beta (x or x:y)");
    witness->add_option("--beta-vec", cfg.beta_vec, "beta_vec, d-2 comma-separated amplitudes");
    witness->add_flag("--canonical", cfg.canonical, "Use the optimal amplitudes");
    witness->add_option("--fields", cfg.fields_path, "Write v, w and the projected advection term");
    CLI::App* sums = app.add_subcommand("sums", "Lattice sums at a given k");
    common(sums);
    sums->add_option("--k", cfg.k, "Lattice vector, comma separated")->delimiter(',');
    sums->add_option("--truncation", truncation, "Truncation radius of the direct sum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (chosen->count("--rho") > 0) {
        cfg.rho = rho;
    }
    if (chosen->get_option_no_throw("--search-radius") && chosen->count("--search-radius") > 0) {
        cfg.search_radius = radius;
    }
    if (chosen->get_option_no_throw("--truncation") && chosen->count("--truncation") > 0) {
        cfg.truncation = truncation;
    }

    try {
        if (cfg.subcommand == "certify") {
            return cmd_certify(cfg, out, err);
        }
        if (cfg.subcommand == "table") {
            return cmd_table(cfg, out, err);
        }
        if (cfg.subcommand == "witness") {
            if (cfg.n.empty()) {
                cfg.n = {2};
            }
            return cmd_witness(cfg, out, err);
        }
        return cmd_sums(cfg, out, err);
    } catch (const inconclusive_search& e) {
        err << "error: " << e.what() << '\n';
        return kExitInconclusive;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

/// Convenience overload; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<const char*> argv{"sharpk"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace sharpk::cli

#endif // SHARPK_CLI_HPP

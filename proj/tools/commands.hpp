#pragma once

// Table builders behind the qes command-line tool.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qes/critical.hpp"
#include "qes/eigensolver.hpp"
#include "qes/mathieu.hpp"
#include "qes/parallel.hpp"
#include "table.hpp"

namespace qes::cli {

/// Bad command-line configuration (exit code 2).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Format { csv, json };

struct RunConfig {
    std::string command;
    Format format = Format::csv;
    std::string out_path;

    int big_n = 0;
    std::optional<double> xi;
    std::optional<double> xi_lo, xi_hi;
    double xi_step = 0.1;
    double xi_max = 2.0;
    double scan_step = 1e-3;
    int odd_up_to = 0;
    std::vector<int> n_list;
    double g = 1.0;
    double g_lo = 1.0, g_hi = 2.0;
    int k = 3;
    int n_max = 32;
    double tol_reality = 1e-9;
    std::optional<double> tol_bisection;
};

struct Output {
    Table table;
    ordered_json config;
    std::vector<std::string> notes;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

inline void require_positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be a positive number");
}

inline std::vector<double> xi_values(const RunConfig& c) {
    if (c.xi) {
        require(!c.xi_lo && !c.xi_hi, "give either --xi or --xi-lo/--xi-hi, not both");
        require(std::isfinite(*c.xi), "--xi must be finite");
        return {*c.xi};
    }
    require(c.xi_lo && c.xi_hi, "spectrum needs --xi or both --xi-lo and --xi-hi");
    require(std::isfinite(*c.xi_lo) && std::isfinite(*c.xi_hi) && *c.xi_hi >= *c.xi_lo,
            "xi range must satisfy xi-lo <= xi-hi");
    require_positive(c.xi_step, "--xi-step");
    const double span = *c.xi_hi - *c.xi_lo;
    const auto count = static_cast<std::size_t>(std::floor(span / c.xi_step + 1e-9)) + 1;
    require(count <= 1000000, "xi range holds too many points");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(*c.xi_lo + static_cast<double>(i) * c.xi_step);
    return out;
}

inline ordered_json base_config(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["format"] = c.format == Format::csv ? "csv" : "json";
    return j;
}

}  // namespace detail

inline Output cmd_spectrum(const RunConfig& c) {
    detail::require(c.big_n >= 1, "--N must be >= 1");
    detail::require_positive(c.tol_reality, "--tol-reality");
    const auto grid = detail::xi_values(c);
    const SpectralOptions opts{c.tol_reality};
    const auto spectra =
        parallel_map(grid.size(), [&](std::size_t i) { return qes_spectrum(QesProblem(c.big_n, grid[i]), opts); });

    Output out;
    out.table.columns = {"xi", "eigenvalue_re", "eigenvalue_im", "is_real", "sector"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Spectrum& s = spectra[i];
        for (std::size_t k = 0; k < s.size(); ++k)
            out.table.add({grid[i], s.eigenvalues[k].real(), s.eigenvalues[k].imag(), static_cast<bool>(s.is_real[k]),
                           std::string(s.sector[k] ? to_string(*s.sector[k]) : "none")});
    }
    out.config = detail::base_config(c);
    out.config["N"] = c.big_n;
    if (c.xi) {
        out.config["xi"] = json_number(*c.xi);
    } else {
        out.config["xi_lo"] = json_number(*c.xi_lo);
        out.config["xi_hi"] = json_number(*c.xi_hi);
        out.config["xi_step"] = json_number(c.xi_step);
    }
    out.config["tol_reality"] = json_number(c.tol_reality);
    return out;
}

inline Output cmd_ep(const RunConfig& c) {
    detail::require(c.big_n >= 1 && c.big_n % 2 == 1, "ep needs an odd --N >= 1");
    detail::require_positive(c.xi_max, "--xi-max");
    detail::require_positive(c.scan_step, "--step");
    const double tol = c.tol_bisection.value_or(1e-10);
    detail::require_positive(tol, "--tol");
    CriticalOptions opts;
    opts.scan_step = c.scan_step;
    const auto points = all_critical_points(c.big_n, c.xi_max, opts, tol);

    Output out;
    out.table.columns = {"N", "xi_c", "E_re", "E_im", "gap", "method"};
    for (const auto& p : points)
        out.table.add({static_cast<long long>(p.big_n), p.xi_c, p.coalesced_energy.real(), p.coalesced_energy.imag(),
                       p.gap_at_xic, std::string(to_string(p.method))});
    out.config = detail::base_config(c);
    out.config["N"] = c.big_n;
    out.config["xi_max"] = json_number(c.xi_max);
    out.config["step"] = json_number(c.scan_step);
    out.config["tol"] = json_number(tol);
    return out;
}

inline Output cmd_scaling(const RunConfig& c) {
    std::vector<int> ns = c.n_list;
    if (ns.empty()) {
        detail::require(c.odd_up_to >= 3, "scaling needs --odd-up-to >= 3 or --N-list");
        for (int n = 3; n <= c.odd_up_to; n += 2) ns.push_back(n);
    }
    for (int n : ns) detail::require(n >= 3 && n % 2 == 1, "scaling works on odd N >= 3 only");
    CriticalOptions opts;
    opts.scan_step = c.scan_step;
    detail::require_positive(c.scan_step, "--step");
    const auto table = scaling_table(ns, opts);

    Output out;
    out.table.columns = {"N", "xi_c", "N_xi_c"};
    for (const auto& r : table.rows) out.table.add({static_cast<long long>(r.big_n), r.xi_c, r.n_xi_c});
    out.notes.push_back(std::string("N*xi_c strictly decreasing: ") + (table.monotone_decreasing ? "yes" : "no"));
    out.config = detail::base_config(c);
    out.config["N_list"] = ns;
    out.config["step"] = json_number(c.scan_step);
    return out;
}

inline Output cmd_mathieu_gc(const RunConfig& c) {
    detail::require(std::isfinite(c.g_lo) && std::isfinite(c.g_hi) && c.g_hi > c.g_lo, "need --g-lo < --g-hi");
    detail::require(c.n_max >= MathieuProblem::min_modes, "--n-max must be >= 4");
    const double tol = c.tol_bisection.value_or(1e-6);
    detail::require_positive(tol, "--tol");
    detail::require_positive(c.tol_reality, "--tol-reality");
    const auto r = locate_gc(c.g_lo, c.g_hi, tol, c.n_max, SpectralOptions{c.tol_reality});

    Output out;
    out.table.columns = {"g_c", "n_max", "certified"};
    out.table.add({r.g_c, static_cast<long long>(r.n_max), r.certified});
    out.notes.push_back("g_c at n_max = " + std::to_string(2 * r.n_max) + ": " + format_double(r.g_c_doubled));
    out.config = detail::base_config(c);
    out.config["g_lo"] = json_number(c.g_lo);
    out.config["g_hi"] = json_number(c.g_hi);
    out.config["tol"] = json_number(tol);
    out.config["n_max"] = c.n_max;
    return out;
}

inline Output cmd_compare(const RunConfig& c) {
    std::vector<int> ns = c.n_list;
    if (ns.empty() && c.big_n > 0) ns.push_back(c.big_n);
    detail::require(!ns.empty(), "compare needs --N or --N-list");
    for (int n : ns) detail::require(n >= 1 && n % 2 == 1, "compare works on odd N only");
    detail::require(std::isfinite(c.g), "--g must be finite");
    detail::require(c.k >= 1, "--k must be >= 1");
    for (int n : ns) detail::require(c.k <= n, "--k must not exceed N");
    detail::require(c.n_max >= MathieuProblem::min_modes, "--n-max must be >= 4");
    const SpectralOptions opts{c.tol_reality};
    const auto reports = parallel_map(ns.size(), [&](std::size_t i) { return qes_vs_mathieu(ns[i], c.g, c.k, c.n_max, opts); });

    Output out;
    out.table.columns = {"N", "level", "E_qes_shifted_re", "E_qes_shifted_im", "E_mathieu_re", "E_mathieu_im", "abs_dev"};
    for (const auto& rep : reports)
        for (const auto& row : rep.rows)
            out.table.add({static_cast<long long>(rep.big_n), static_cast<long long>(row.level), row.qes_shifted.real(),
                           row.qes_shifted.imag(), row.mathieu.real(), row.mathieu.imag(), row.abs_dev});
    out.config = detail::base_config(c);
    out.config["N_list"] = ns;
    out.config["g"] = json_number(c.g);
    out.config["k"] = c.k;
    out.config["n_max"] = c.n_max;
    return out;
}

inline Output run_command(const RunConfig& c) {
    if (c.command == "spectrum") return cmd_spectrum(c);
    if (c.command == "ep") return cmd_ep(c);
    if (c.command == "scaling") return cmd_scaling(c);
    if (c.command == "mathieu-gc") return cmd_mathieu_gc(c);
    if (c.command == "compare") return cmd_compare(c);
    throw UsageError("unknown command '" + c.command + "'");
}

inline void write_output(std::ostream& os, const Output& out, Format f) {
    if (f == Format::csv)
        write_csv(os, out.table);
    else
        write_json(os, out.table, out.config);
}

}  // namespace qes::cli

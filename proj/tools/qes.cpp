// qes: spectra, exceptional points, N|xi_c| scaling and the Mathieu comparison as
// CSV or JSON tables.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

void add_common(CLI::App* sub, qes::cli::RunConfig& c) {
    sub->add_option("--format", c.format, "Output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, qes::cli::Format>{{"csv", qes::cli::Format::csv}, {"json", qes::cli::Format::json}},
            CLI::ignore_case));
    sub->add_option("--out", c.out_path, "Write to this file instead of standard output");
}

}  // namespace

int main(int argc, char** argv) {
    using qes::cli::RunConfig;
    RunConfig c;
    CLI::App app{"Quasi-exactly solvable periodic PT potential: spectra, exceptional points, Mathieu limit"};
    app.require_subcommand(1);

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the gauged matrix on one xi or a xi range");
    spectrum->add_option("--N", c.big_n, "Matrix size N")->required();
    spectrum->add_option("--xi", c.xi, "Single coupling");
    spectrum->add_option("--xi-lo", c.xi_lo, "Range start");
    spectrum->add_option("--xi-hi", c.xi_hi, "Range end (inclusive)");
    spectrum->add_option("--xi-step", c.xi_step, "Range step")->capture_default_str();
    spectrum->add_option("--tol-reality", c.tol_reality, "Relative |Im E| threshold for real")->capture_default_str();

    auto* ep = app.add_subcommand("ep", "All exceptional points 0 <= xi_c <= xi-max for odd N");
    ep->add_option("--N", c.big_n, "Odd N")->required();
    ep->add_option("--xi-max", c.xi_max, "Scan limit")->capture_default_str();
    ep->add_option("--step", c.scan_step, "Pre-scan step")->capture_default_str();
    ep->add_option("--tol", c.tol_bisection, "Bisection width (default 1e-10)");

    auto* scaling = app.add_subcommand("scaling", "First exceptional point and N*xi_c for odd N");
    auto* up_to = scaling->add_option("--odd-up-to", c.odd_up_to, "Use N = 3, 5, ..., this value");
    scaling->add_option("--N-list", c.n_list, "Explicit comma-separated odd N")->delimiter(',')->excludes(up_to);
    scaling->add_option("--step", c.scan_step, "Pre-scan step")->capture_default_str();

    auto* gc = app.add_subcommand("mathieu-gc", "Branch point g_c of the imaginary-coupling Mathieu equation");
    gc->add_option("--g-lo", c.g_lo, "Bracket start")->capture_default_str();
    gc->add_option("--g-hi", c.g_hi, "Bracket end")->capture_default_str();
    gc->add_option("--tol", c.tol_bisection, "Bisection width (default 1e-6)");
    gc->add_option("--n-max", c.n_max, "Fourier truncation")->capture_default_str();
    gc->add_option("--tol-reality", c.tol_reality, "Relative |Im E| threshold for real")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Lowest QES levels E + N^2 next to Mathieu levels at g = N xi");
    compare->add_option("--N", c.big_n, "Odd N");
    compare->add_option("--N-list", c.n_list, "Comma-separated odd N")->delimiter(',');
    compare->add_option("--g", c.g, "Coupling g")->capture_default_str();
    compare->add_option("--k", c.k, "Levels per N")->capture_default_str();
    compare->add_option("--n-max", c.n_max, "Fourier truncation")->capture_default_str();

    for (auto* sub : {spectrum, ep, scaling, gc, compare}) add_common(sub, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    c.command = app.get_subcommands().front()->get_name();

    qes::cli::Output out;
    try {
        out = qes::cli::run_command(c);
    } catch (const qes::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const qes::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const qes::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }

    std::ostringstream buffer;
    qes::cli::write_output(buffer, out, c.format);
    if (c.out_path.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream file(c.out_path, std::ios::binary);
        if (!file || !(file << buffer.str())) {
            std::cerr << "error: cannot write " << c.out_path << "\n";
            return exit_usage;
        }
    }
    for (const auto& note : out.notes) std::cerr << note << "\n";
    return 0;
}

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "jetgeo/errors.hpp"
#include "jetgeo/report.hpp"
#include "jetgeo/specfile.hpp"
#include "jetgeo/verify.hpp"

namespace {

// 0 ok, 1 verification failure, 2 bad spec or usage, 3 numeric failure
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadSpec = 2;
constexpr int kExitNumeric = 3;

// Output is rendered completely before anything is written, so a failure
// never leaves a partial report behind.
int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    f.close();
    if (!f) {
        std::cerr << "cannot write output file '" << out_path << "'\n";
        return kExitNumeric;
    }
    return 0;
}

int run_analyze(const jetgeo::SpecDocument& doc_in, bool symbolic,
                const std::string& out_path) {
    jetgeo::SpecDocument doc = doc_in;
    doc.options.symbolic = doc.options.symbolic || symbolic;
    if (!jetgeo::metric_curvature_is_flat(doc.metric)) {
        int defaulted = 0;
        for (const jetgeo::EvalPoint& p : doc.points)
            if (!p.x1_given) ++defaulted;
        if (defaulted > 0)
            std::cerr << "note: " << defaulted << " evaluation point(s) take the "
                      << "default velocity x1 = 0 and the spatial metric is not "
                      << "structurally flat; fields that contract the velocity "
                      << "vanish at those points\n";
    }
    return write_output(jetgeo::render_report(doc), out_path);
}

int run_verify(const jetgeo::SpecDocument& doc, const jetgeo::VerifyOptions& opts) {
    const std::vector<jetgeo::CheckResult> checks =
        jetgeo::run_verification(doc, opts);
    std::cout << jetgeo::render_verify_summary(checks);
    return jetgeo::all_passed(checks) ? 0 : kExitVerifyFailed;
}

int run_ym_map(const jetgeo::SpecDocument& doc, const std::string& grid_text,
               const std::string& out_path) {
    const jetgeo::GridSpec grid = jetgeo::parse_grid(grid_text, doc.system.n);
    return write_output(jetgeo::render_ym_map(doc, grid), out_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric analysis of first-order ODE systems on the 1-jet space"};
    app.require_subcommand(1);

    std::string analyze_spec, analyze_out;
    bool analyze_symbolic = false;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "report the connection, torsion, field strength, and energy "
                   "at each evaluation point");
    analyze->add_option("spec", analyze_spec, "spec file (JSON)")->required();
    analyze->add_flag("--symbolic", analyze_symbolic,
                      "also print the connection and field matrices symbolically");
    analyze->add_option("--out", analyze_out, "write to this file instead of stdout");

    std::string verify_spec;
    double verify_tol = 0.0;
    bool inject_error = false;
    CLI::App* verify = app.add_subcommand(
        "verify", "run the internal consistency checks at the spec's points");
    verify->add_option("spec", verify_spec, "spec file (JSON)")->required();
    CLI::Option* tol_opt =
        verify->add_option("--tol", verify_tol, "override every check tolerance")
            ->check(CLI::PositiveNumber);
    verify->add_flag("--inject-error", inject_error)->group("");

    std::string map_spec, map_grid, map_out;
    CLI::App* ym_map = app.add_subcommand(
        "ym-map", "sweep the Yang-Mills energy over a coordinate grid (CSV)");
    ym_map->add_option("spec", map_spec, "spec file (JSON)")->required();
    ym_map->add_option("--grid", map_grid,
                       "axes as \"t=lo:hi:count;x1=lo:hi:count;...\", each of "
                       "t, x1..xn exactly once")
        ->required();
    ym_map->add_option("--out", map_out, "write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadSpec;
    }

    try {
        if (analyze->parsed())
            return run_analyze(jetgeo::load_spec(analyze_spec), analyze_symbolic,
                               analyze_out);
        if (verify->parsed()) {
            jetgeo::VerifyOptions opts;
            if (tol_opt->count() > 0) {
                opts.has_override = true;
                opts.tol_override = verify_tol;
            }
            opts.inject_error = inject_error;
            return run_verify(jetgeo::load_spec(verify_spec), opts);
        }
        if (ym_map->parsed())
            return run_ym_map(jetgeo::load_spec(map_spec), map_grid, map_out);
    } catch (const jetgeo::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitBadSpec;
    } catch (const jetgeo::ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return kExitBadSpec;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}

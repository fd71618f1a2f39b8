// skfib: model validation and verification-suite runner.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 input/usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "skfib/suites.hpp"

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("SKFIB_OUT_DIR")) return env;
    return ".";
}

int do_validate(const std::string& model_path) {
    auto model = skfib::io::load_model(model_path);
    std::cout << "ok: " << model.type << " model, hash " << model.hash << "\n";
    if (model.prepotential)
        std::cout << "  prepotential in " << model.prepotential->n() << " variable(s), domain certified\n";
    if (model.period_model) std::cout << "  period model in " << model.period_model->n << " variable(s)\n";
    if (model.orbit)
        std::cout << "  nilpotent orbit model, n = " << model.orbit->n << ", k = " << model.orbit->k << "\n";
    if (model.monodromy)
        std::cout << "  monodromy representation with " << model.monodromy->generators.size() << " generator(s)\n";
    if (model.metric) std::cout << "  metric model kind '" << model.metric->kind << "'\n";
    return 0;
}

int do_run(const std::string& suite, const std::string& model_path, const skfib::io::SweepSpec& spec,
           const std::string& out_dir) {
    auto model = skfib::io::load_model(model_path);
    auto report = skfib::io::run_suite(suite, model, spec);
    auto files = skfib::io::emit_report(report, out_dir);
    for (const auto& r : report.records)
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << skfib::io::format_double(r.measured)
                  << " " << r.comparator << " " << skfib::io::format_double(r.bound) << "\n";
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return report.all_pass() ? 0 : 1;
}

int do_report(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw skfib::io_error("cannot open report '" + report_path + "'");
    auto doc = nlohmann::json::parse(in);
    std::cout << "suite: " << doc.value("suite", "?") << "  model: " << doc.value("model_hash", "?") << "\n";
    for (const auto& r : doc.at("records"))
        std::cout << (r.value("pass", false) ? "[PASS] " : "[FAIL] ") << r.value("name", "?") << " (measured "
                  << r.at("measured").dump() << ", bound " << r.at("bound").dump() << ", from "
                  << r.value("provenance", "?") << ")\n";
    std::cout << (doc.value("pass", false) ? "result: pass\n" : "result: FAIL\n");
    return doc.value("pass", false) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"special Kahler / semi-flat verification toolkit"};
    app.require_subcommand(1);

    std::string model_path, out_dir = default_out_dir(), report_path, suite;
    skfib::io::SweepSpec spec;

    auto* validate = app.add_subcommand("validate", "load a model file and check its invariants");
    validate->add_option("--model", model_path, "model JSON file")->required();

    auto* run = app.add_subcommand("run", "run a verification suite against a model");
    run->add_option("suite", suite, "special-kahler | semiflat | rotation | degeneration | collapse | syz")
        ->required();
    run->add_option("--model", model_path, "model JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default $SKFIB_OUT_DIR or .)");
    run->add_option("--t-sweep", spec.t_sweep, "t values")->delimiter(',');
    run->add_option("--rho-sweep", spec.rho_sweep, "rho values")->delimiter(',');
    run->add_option("--resolution", spec.resolution, "mesh / grid resolution");
    run->add_option("--samples", spec.samples, "sample count");
    run->add_option("--tolerance", spec.tolerance, "override the default check tolerance where applicable");
    run->add_option("--seed", spec.seed, "RNG seed (reports are deterministic given model + spec + seed)");

    auto* report = app.add_subcommand("report", "pretty-print a saved report");
    report->add_option("--in", report_path, "report JSON file")->required();

    try {
        app.parse(argc, argv);
        if (validate->parsed()) return do_validate(model_path);
        if (run->parsed()) return do_run(suite, model_path, spec, out_dir);
        if (report->parsed()) return do_report(report_path);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const skfib::io_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const skfib::model_error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

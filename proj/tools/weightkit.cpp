// weightkit: generate weight sequences, run condition batteries, re-emit reports.
//
// Exit codes: 0 success, 1 schema or usage error, 2 computation error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ultraweight/analysis.hpp"
#include "ultraweight/assoc.hpp"
#include "ultraweight/counterexample.hpp"
#include "ultraweight/matrix.hpp"
#include "ultraweight/sequence.hpp"

using namespace ultraweight;
using nlohmann::json;

namespace {

constexpr int kSchemaError = 1;
constexpr int kComputationError = 2;

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) throw Error("cannot write '" + out + "'");
}

struct GenArgs {
    std::string family;
    std::vector<std::string> params;
    std::size_t horizon = kDefaultHorizon;
    std::size_t levels = 0;
    std::vector<std::string> variant;
    double b1 = 1;
    bool matrix = false;
    std::vector<double> grid;
    std::string out;
};

struct AnalyzeArgs {
    std::string spec;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> d_max;
    std::vector<double> grid;
    std::string format;
    std::string out;
};

struct ReportArgs {
    std::string bundle;
    std::string format = "json";
    std::string out;
};

ParamMap parse_params(const std::vector<std::string>& items) {
    ParamMap p;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidInput("parameter '" + item + "' is not key=value");
        try {
            p[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidInput("parameter '" + item + "' has no numeric value");
        }
    }
    return p;
}

int run_gen(const GenArgs& a) {
    json doc;
    if (a.levels > 0) {
        const auto [spec, n] = build_counterexample(a.levels, CounterexampleVariant::from_names(a.variant), a.b1);
        doc = to_json(n);
        doc["schedule"] = to_json(spec);
        if (a.matrix)
            doc = to_json(build_associated_matrix(WeightFunctionHandle::associated(n),
                                                  a.grid.empty() ? dyadic_grid() : a.grid, n.horizon()));
    } else {
        const auto m = make_family(a.family, parse_params(a.params), a.horizon);
        doc = a.matrix ? to_json(build_associated_matrix(WeightFunctionHandle::associated(m),
                                                         a.grid.empty() ? dyadic_grid() : a.grid, m.horizon()))
                       : to_json(m);
    }
    emit(doc.dump(2) + "\n", a.out);
    return 0;
}

int run_analyze(const AnalyzeArgs& a) {
    AnalysisSpec spec = parse_spec(read_file(a.spec));
    if (a.horizon) {
        if (*a.horizon < 4) throw SchemaError({"--horizon: expected an integer >= 4"});
        spec.horizon = a.horizon;
    }
    if (a.d_max) spec.options.d_max = *a.d_max;
    if (!a.grid.empty()) spec.options.grid = a.grid;
    if (!a.format.empty()) spec.format = a.format;
    if (!a.out.empty()) spec.path = a.out;
    const auto bundle = run_analysis(spec);
    emit(emit_report(bundle, spec.format), spec.path);
    return 0;
}

int run_report(const ReportArgs& a) {
    const auto bundle = bundle_from_json(json::parse(read_file(a.bundle)));
    emit(emit_report(bundle, a.format), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weight sequence and weight matrix growth-condition toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Emit a builtin or counterexample sequence (or its associated matrix) as JSON");
    auto* fam = g->add_option("--family", gen.family, "gevrey, q_gevrey, double_exp or constant_one");
    g->add_option("--param", gen.params, "Family parameter key=value (repeatable)");
    g->add_option("--horizon", gen.horizon, "Largest index P")->check(CLI::Range(4, 1 << 24));
    auto* ce = g->add_option("--counterexample", gen.levels, "Number of levels J of the counterexample")
                   ->check(CLI::Range(4, 64));
    g->add_option("--variant", gen.variant, "minimal, quasianalytic, strong_b (repeatable)");
    g->add_option("--b1", gen.b1, "First slope of the counterexample");
    g->add_flag("--matrix", gen.matrix, "Emit the associated weight matrix instead");
    g->add_option("--grid", gen.grid, "Matrix index grid, comma separated")->delimiter(',');
    g->add_option("--out", gen.out, "Output path (default: stdout)");
    fam->excludes(ce);

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "Run an analysis spec and emit the report bundle");
    a->add_option("spec", an.spec, "Spec JSON file ('-' for stdin)")->required();
    a->add_option("--horizon", an.horizon, "Horizon override");
    a->add_option("--d-max", an.d_max, "Largest d for genmg, equlemma and the quotient/root search")
        ->check(CLI::Range(1, 64));
    a->add_option("--grid", an.grid, "Matrix index grid, comma separated")->delimiter(',');
    a->add_option("--format", an.format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));
    a->add_option("--out", an.out, "Output path (default: spec output path or stdout)");

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Re-emit a JSON bundle as json, csv or plotdata");
    r->add_option("bundle", rep.bundle, "Bundle JSON file ('-' for stdin)")->required();
    r->add_option("--format", rep.format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));
    r->add_option("--out", rep.out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kSchemaError;
    }

    try {
        if (g->parsed()) {
            if (gen.family.empty() && gen.levels == 0) throw InvalidInput("gen needs --family or --counterexample");
            return run_gen(gen);
        }
        if (a->parsed()) return run_analyze(an);
        return run_report(rep);
    } catch (const SchemaError& e) {
        std::cerr << "weightkit: " << e.what() << "\n";
        return kSchemaError;
    } catch (const json::exception& e) {
        std::cerr << "weightkit: malformed JSON: " << e.what() << "\n";
        return kSchemaError;
    } catch (const InvalidInput& e) {
        // only argument-level problems reach here before any computation starts
        std::cerr << "weightkit: " << e.what() << "\n";
        return kSchemaError;
    } catch (const std::exception& e) {
        std::cerr << "weightkit: " << e.what() << "\n";
        return kComputationError;
    }
}

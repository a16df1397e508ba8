// obstrukt: triple-point obstructions, linking and twisted cobordism classes.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "obstrukt/error.hpp"
#include "obstrukt/run.hpp"

namespace {

struct CommonFlags {
    std::optional<double> tol_residual;
    std::optional<double> tol_pivot;
    std::optional<std::size_t> grid;
    std::optional<double> a_min;
    std::optional<double> a_max;
    std::optional<unsigned> threads;
    bool strict = false;
    bool machine = false;
    std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--tol-residual", f.tol_residual, "Residual tolerance for certified zeros");
    cmd->add_option("--tol-pivot", f.tol_pivot, "Relative pivot tolerance for rank decisions");
    cmd->add_option("--grid", f.grid, "Seed grid nodes per axis");
    cmd->add_option("--a-min", f.a_min, "Lower bound of the weight box");
    cmd->add_option("--a-max", f.a_max, "Upper bound of the weight box");
    cmd->add_option("--threads", f.threads, "Worker count (default: OBSTRUKT_THREADS or all cores)");
    cmd->add_flag("--strict", f.strict, "Exit with status 4 when suspect results remain");
    cmd->add_flag("--machine", f.machine, "One key=value record per line");
    cmd->add_option("-o,--output", f.output, "Write the report to this file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triple-point obstructions, linking numbers and twisted cobordism classes"};
    app.require_subcommand(1);
    CommonFlags flags;
    obstrukt::RunSpec spec;

    auto* gen = app.add_subcommand("verify-generator", "Verify the generator family end to end");
    gen->add_option("--n", spec.n, "Target dimension n")->check(CLI::Range(2, 12));
    gen->add_option("--samples", spec.samples, "Samples for the missing-point checks");
    add_common(gen, flags);

    auto* triple = app.add_subcommand("triple-obstruction", "Triple-point obstruction of a pair map");
    triple->add_option("spec", spec.inputs, "Pair-map spec file")->required()->expected(1);
    add_common(triple, flags);

    auto* dbl = app.add_subcommand("double-obstruction", "Double points of an immersion");
    dbl->add_option("spec", spec.inputs, "Pair-map spec file")->required()->expected(1);
    add_common(dbl, flags);

    auto* link = app.add_subcommand("linking", "Linking number of two closed curves");
    link->add_option("curves", spec.inputs, "Two curve files")->required()->expected(2);
    add_common(link, flags);

    auto* knot = app.add_subcommand("knotting-table", "Knotting groups of spheres for k = 1..kmax");
    knot->add_option("--kmax", spec.kmax, "Largest k")->check(CLI::PositiveNumber);
    add_common(knot, flags);

    auto* pi0 = app.add_subcommand("pi0", "Classify a signed point configuration on a graph");
    pi0->add_option("config", spec.inputs, "Configuration file")->required()->expected(1);
    add_common(pi0, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    spec.command = app.get_subcommands().front()->get_name();
    spec.tol_residual = flags.tol_residual;
    spec.tol_pivot = flags.tol_pivot;
    spec.grid = flags.grid;
    spec.a_min = flags.a_min;
    spec.a_max = flags.a_max;
    spec.strict = flags.strict;
    spec.machine = flags.machine;
    spec.output = flags.output;
    try {
        spec.threads = obstrukt::resolve_threads(flags.threads);
    } catch (const obstrukt::InputError& e) {
        std::cerr << "obstrukt: " << e.what() << '\n';
        return 3;
    }

    const obstrukt::Report report = obstrukt::run(spec);
    const std::string text = obstrukt::render(report, spec.machine);
    if (spec.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(spec.output);
        if (!out) {
            std::cerr << "obstrukt: cannot write " << spec.output << '\n';
            return 3;
        }
        out << text;
    }
    if (report.error) std::cerr << "obstrukt: " << *report.error << '\n';
    return obstrukt::exit_code(report);
}

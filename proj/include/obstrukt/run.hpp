#pragma once

// Subcommand driver behind the obstrukt command-line tool.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obstrukt/pairmaps.hpp"
#include "obstrukt/report.hpp"

namespace obstrukt {

struct RunSpec {
    std::string command;               // verify-generator, triple-obstruction, ...
    std::vector<std::string> inputs;   // positional file arguments
    std::optional<double> tol_residual;
    std::optional<double> tol_pivot;   // relative pivot tolerance for rank decisions
    std::optional<std::size_t> grid;
    std::optional<double> a_min;
    std::optional<double> a_max;
    std::size_t n = 3;                 // verify-generator
    std::size_t kmax = 12;             // knotting-table
    std::size_t samples = 100000;      // verify-generator missing-point sampling
    bool strict = false;
    bool machine = false;
    unsigned threads = 1;
    std::string output;                // empty: standard output
};

// Throws InputError for non-positive tolerances, a zero worker count or an
// unknown command.
void validate_run_spec(const RunSpec& spec);

// Never throws for bad input files: input errors become an error report with exit code 3.
Report run(const RunSpec& spec);

std::string render(const Report& report, bool machine);

// Flag value if given, else OBSTRUKT_THREADS, else the hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> flag);

// Pair-map spec file: keys m, n, kind (builtin:generator, builtin:difference,
// chart), points (list of m-vectors), chart, period, param.
struct PairMapFile {
    std::size_t m = 0;
    std::size_t n = 0;
    std::string kind;
    std::vector<RealVector> points;
    std::string chart;
    std::optional<double> period;
    std::optional<RealVector> param;
};

PairMapFile read_pair_map_file(const std::string& path);
PairMapFile parse_pair_map(std::istream& in);

// The pair map described by a file; charts are rejected with InputError.
PairMapSpec build_pair_map(const PairMapFile& file);
Chart build_chart(const PairMapFile& file);

inline const std::vector<std::string> kCommands{"verify-generator", "triple-obstruction", "double-obstruction",
                                                "linking",          "knotting-table",     "pi0"};

}  // namespace obstrukt

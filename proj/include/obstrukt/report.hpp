#pragma once

// Structured run reports: inputs, tolerances, results, certificates and one
// named check per verified statement. Rendered as indented text or as one
// key=value record per line (--machine).

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace obstrukt {

enum class CheckStatus { Pass, Fail, Suspect };

std::string to_string(CheckStatus status);

struct Check {
    std::string name;    // stable identifier, e.g. unique-zero-orbit
    std::string claim;   // the statement being verified
    CheckStatus status = CheckStatus::Pass;
    std::string detail;  // measured values
};

using Field = std::pair<std::string, std::string>;

struct Report {
    std::string command;
    bool strict = false;
    std::vector<Field> inputs;
    std::vector<Field> tolerances;
    std::vector<Field> results;
    std::vector<std::string> certificates;
    std::vector<Check> checks;
    std::optional<std::string> error;  // invalid input

    void add_check(std::string name, std::string claim, bool passed, std::string detail);
    void add_check(std::string name, std::string claim, CheckStatus status, std::string detail);
};

// 0 all checks pass, 2 a check failed, 3 invalid input, 4 suspect results in strict mode.
int exit_code(const Report& report);

std::string overall_status(const Report& report);

std::string render_text(const Report& report);
std::string render_machine(const Report& report);

// Fixed-format real number used throughout reports (%.12g, "-0" printed as "0").
std::string fmt(double value);
std::string fmt_vector(const std::vector<double>& v);

}  // namespace obstrukt

#include "obstrukt/report.hpp"

#include <cstdio>
#include <sstream>

namespace obstrukt {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

// Field names become single tokens in machine records.
std::string token(std::string s) {
    for (char& c : s)
        if (c == ' ') c = '-';
    return s;
}

}  // namespace

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Suspect: return "suspect";
    }
    return "?";
}

void Report::add_check(std::string name, std::string claim, bool passed, std::string detail) {
    add_check(std::move(name), std::move(claim), passed ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail));
}

void Report::add_check(std::string name, std::string claim, CheckStatus status, std::string detail) {
    checks.push_back({std::move(name), std::move(claim), status, std::move(detail)});
}

int exit_code(const Report& report) {
    if (report.error) return 3;
    bool suspect = false;
    for (const auto& c : report.checks) {
        if (c.status == CheckStatus::Fail) return 2;
        if (c.status == CheckStatus::Suspect) suspect = true;
    }
    return suspect && report.strict ? 4 : 0;
}

std::string overall_status(const Report& report) {
    switch (exit_code(report)) {
        case 0: {
            for (const auto& c : report.checks)
                if (c.status == CheckStatus::Suspect) return "pass-with-suspects";
            return "pass";
        }
        case 2: return "fail";
        case 3: return "invalid-input";
        case 4: return "suspect";
    }
    return "?";
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "obstrukt report\n";
    out << "command: " << report.command << '\n';
    out << "strict: " << (report.strict ? "yes" : "no") << '\n';
    auto section = [&](const char* title, const std::vector<Field>& fields) {
        if (fields.empty()) return;
        out << title << ":\n";
        for (const auto& [k, v] : fields) out << "  " << k << ": " << v << '\n';
    };
    section("inputs", report.inputs);
    section("tolerances", report.tolerances);
    if (report.error) out << "error: " << *report.error << '\n';
    section("results", report.results);
    if (!report.certificates.empty()) {
        out << "certificates:\n";
        for (const auto& c : report.certificates) out << "  " << c << '\n';
    }
    if (!report.checks.empty()) {
        out << "checks:\n";
        for (const auto& c : report.checks) {
            std::string tag = to_string(c.status);
            for (auto& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            out << "  [" << tag << "] " << c.name << ": " << c.claim << '\n';
            if (!c.detail.empty()) out << "      " << c.detail << '\n';
        }
    }
    out << "status: " << overall_status(report) << '\n';
    out << "exit: " << exit_code(report) << '\n';
    return out.str();
}

std::string render_machine(const Report& report) {
    std::ostringstream out;
    out << "record=header command=" << report.command << " strict=" << (report.strict ? "yes" : "no") << '\n';
    auto fields = [&](const char* kind, const std::vector<Field>& list) {
        for (const auto& [k, v] : list) out << "record=" << kind << " name=" << token(k) << " value=" << quote(v) << '\n';
    };
    fields("input", report.inputs);
    fields("tolerance", report.tolerances);
    if (report.error) out << "record=error message=" << quote(*report.error) << '\n';
    fields("result", report.results);
    for (std::size_t i = 0; i < report.certificates.size(); ++i) {
        out << "record=certificate index=" << i << " text=" << quote(report.certificates[i]) << '\n';
    }
    for (const auto& c : report.checks) {
        out << "record=check name=" << c.name << " status=" << to_string(c.status) << " claim=" << quote(c.claim)
            << " detail=" << quote(c.detail) << '\n';
    }
    out << "record=summary status=" << overall_status(report) << " exit=" << exit_code(report) << '\n';
    return out.str();
}

std::string fmt(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out + ")";
}

}  // namespace obstrukt

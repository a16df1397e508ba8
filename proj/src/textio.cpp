#include "obstrukt/textio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "obstrukt/error.hpp"

namespace obstrukt {

namespace {

bool is_key_line(std::string_view line, std::size_t& colon) {
    if (line.empty() || !(std::isalpha(static_cast<unsigned char>(line[0])) || line[0] == '_')) return false;
    std::size_t i = 1;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    if (i >= line.size() || line[i] != ':') return false;
    colon = i;
    return true;
}

std::string where(std::string_view context) { return std::string(context); }

}  // namespace

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

KeyedText KeyedText::parse(std::istream& in) {
    KeyedText out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string body = trim(raw);
        if (body.empty()) continue;
        std::size_t colon = 0;
        const bool indented = !raw.empty() && std::isspace(static_cast<unsigned char>(raw[0]));
        if (!indented && is_key_line(body, colon)) {
            KeyedEntry e;
            e.key = body.substr(0, colon);
            e.value = trim(std::string_view(body).substr(colon + 1));
            e.line = line_no;
            if (out.find(e.key)) {
                throw InputError("line " + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
            }
            out.entries_.push_back(std::move(e));
            continue;
        }
        if (out.entries_.empty()) {
            throw InputError("line " + std::to_string(line_no) + ": list item before any key");
        }
        std::string item = body;
        if (item.size() >= 2 && item[0] == '-' && item[1] == ' ') item = trim(std::string_view(item).substr(2));
        out.entries_.back().items.push_back(std::move(item));
    }
    return out;
}

KeyedText KeyedText::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    return parse(in);
}

const KeyedEntry* KeyedText::find(std::string_view key) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const KeyedEntry& e) { return e.key == key; });
    return it == entries_.end() ? nullptr : &*it;
}

const KeyedEntry& KeyedText::require(std::string_view key) const {
    if (const auto* e = find(key)) return *e;
    throw InputError("missing required key '" + std::string(key) + "'");
}

void KeyedText::allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& e : entries_) {
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
            throw InputError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
    }
}

double parse_double(std::string_view token, std::string_view context) {
    const std::string t = trim(token);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used == t.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw InputError(where(context) + ": not a finite number: '" + t + "'");
}

long parse_long(std::string_view token, std::string_view context) {
    const std::string t = trim(token);
    long v = 0;
    const char* first = t.data();
    if (!t.empty() && t[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw InputError(where(context) + ": not an integer: '" + t + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view token, std::string_view context) {
    const long v = parse_long(token, context);
    if (v < 0) throw InputError(where(context) + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

RealVector parse_vector(std::string_view line, std::string_view context) {
    std::string text = trim(line);
    // Accept "(1, 2, 3)" and "[1, 2, 3]" as well as "1 2 3".
    std::replace_if(text.begin(), text.end(), [](char ch) { return ch == ',' || ch == '(' || ch == ')' || ch == '[' || ch == ']'; }, ' ');
    RealVector out;
    for (const auto& w : split_words(text)) out.push_back(parse_double(w, context));
    if (out.empty()) throw InputError(where(context) + ": empty vector");
    return out;
}

}  // namespace obstrukt

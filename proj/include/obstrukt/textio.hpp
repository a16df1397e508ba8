#pragma once

// Minimal keyed text format shared by the input files:
//
//   # comment
//   key: value
//   list_key:
//     item line
//     item line
//
// A key line is an identifier followed by a colon at the start of the line.
// Any other non-blank line is an item of the most recent key.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "obstrukt/numkit.hpp"

namespace obstrukt {

struct KeyedEntry {
    std::string key;
    std::string value;               // text after the colon, trimmed
    std::vector<std::string> items;  // following item lines, trimmed
    std::size_t line = 0;
};

class KeyedText {
public:
    // Throws InputError on duplicate keys or items before the first key.
    static KeyedText parse(std::istream& in);
    static KeyedText parse_file(const std::string& path);

    const std::vector<KeyedEntry>& entries() const { return entries_; }
    const KeyedEntry* find(std::string_view key) const;
    const KeyedEntry& require(std::string_view key) const;
    // Throws InputError naming the first key not in the allowed list.
    void allow_only(std::initializer_list<std::string_view> keys) const;

private:
    std::vector<KeyedEntry> entries_;
};

std::string trim(std::string_view s);
std::vector<std::string> split_words(std::string_view s);
double parse_double(std::string_view token, std::string_view context);
long parse_long(std::string_view token, std::string_view context);
std::size_t parse_count(std::string_view token, std::string_view context);
RealVector parse_vector(std::string_view line, std::string_view context);

}  // namespace obstrukt

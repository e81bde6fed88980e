#pragma once

// Small text helpers shared by the plain-text file formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hdmrnn {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// Whole-field parses; `line` is only used for error reporting.
double parse_double(std::string_view text, std::size_t line = 0);
long long parse_integer(std::string_view text, std::size_t line = 0);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

struct KeyValue {
  std::size_t line;
  std::string key;
  std::string value;
};

// `key = value` lines; blank lines and lines starting with '#' are skipped.
std::vector<KeyValue> parse_key_values(std::string_view text);

}  // namespace hdmrnn

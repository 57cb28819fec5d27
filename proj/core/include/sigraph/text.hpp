#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sigraph {

// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

// Parses a complete token as a finite double.
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delimiter);

// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_whitespace(std::string_view text);

}  // namespace sigraph

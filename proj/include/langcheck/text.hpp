#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the prompt builders, parsers and loaders.
namespace langcheck::text {

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);
std::string_view trim_right(std::string_view s);

// Unicode NFC via ICU. Invalid UTF-8 sequences become U+FFFD.
std::string nfc(std::string_view s);

// NFC + trim; the canonical form every ingested string goes through.
std::string normalize(std::string_view s);

// Replaces each run of line breaks (and the blanks around it) with a single
// space, then trims.
std::string single_line(std::string_view s);

// Collapses every whitespace run to one space and trims.
std::string squeeze_spaces(std::string_view s);

std::string ascii_lower(std::string_view s);
// Full Unicode lower-casing.
std::string lower(std::string_view s);
// Upper-cases the first letter of every space-separated word.
std::string title_case(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
// Case-insensitive (ASCII) find; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0);

std::vector<std::string_view> split_lines(std::string_view s);

bool is_ascii_alpha(char c);
bool is_space(char c);

}  // namespace langcheck::text

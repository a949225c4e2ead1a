#pragma once

#include <string>
#include <vector>

namespace batchq::cli {

// Comma-separated items, each a number, `inf`, or an inclusive range
// `start:step:stop`. Throws InvalidArgument on malformed or empty input.
std::vector<double> parse_grid(const std::string& text);

// Comma-separated positive integers.
std::vector<std::int64_t> parse_int_list(const std::string& text);

} // namespace batchq::cli

#include "grid.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "batchq/errors.hpp"

namespace batchq::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse number '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(value)) throw InvalidArgument("cannot parse number '" + s + "'");
  return value;
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (trim(text).empty()) throw InvalidArgument("grid is empty");
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number(parts[0]));
    } else if (parts.size() == 3) {
      const double start = parse_number(parts[0]);
      const double step = parse_number(parts[1]);
      const double stop = parse_number(parts[2]);
      if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(stop) || !(step > 0.0) || stop < start) {
        throw InvalidArgument("grid range '" + item + "' needs finite start <= stop and step > 0");
      }
      const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      if (count > 10'000'000) throw InvalidArgument("grid range '" + item + "' is too long");
      for (std::int64_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
      throw InvalidArgument("malformed grid item '" + item + "'");
    }
  }
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  if (trim(text).empty()) throw InvalidArgument("list is empty");
  std::vector<std::int64_t> out;
  for (const auto& raw : split(text, ',')) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse integer '" + s + "'");
    }
    if (used != s.size() || value < 1) throw InvalidArgument("expected a positive integer, got '" + s + "'");
    out.push_back(value);
  }
  return out;
}

} // namespace batchq::cli

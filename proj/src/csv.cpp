#include "batchq/csv.hpp"

#include <fmt/format.h>

#include "batchq/errors.hpp"

namespace batchq::csv {

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

Writer::Writer(std::ostream& out, const std::vector<std::string>& header) : out_(out), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void Writer::row(std::initializer_list<Cell> cells) { write(cells.begin(), cells.size()); }

void Writer::row(const std::vector<Cell>& cells) { write(cells.data(), cells.size()); }

void Writer::write(const Cell* first, std::size_t count) {
  if (count != width_) throw InvalidArgument("csv row width does not match header");
  for (std::size_t i = 0; i < count; ++i) out_ << (i ? "," : "") << first[i].text();
  out_ << '\n';
}

} // namespace batchq::csv

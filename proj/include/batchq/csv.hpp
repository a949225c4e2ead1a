#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace batchq::csv {

// 17 significant digits, so every double round-trips exactly.
std::string format_number(double value);

class Cell {
public:
  Cell(double v) : text_(format_number(v)) {}
  Cell(std::int64_t v) : text_(std::to_string(v)) {}
  Cell(int v) : text_(std::to_string(v)) {}
  Cell(bool v) : text_(v ? "true" : "false") {}
  Cell(std::string v) : text_(std::move(v)) {}
  Cell(const char* v) : text_(v) {}

  const std::string& text() const { return text_; }

private:
  std::string text_;
};

// Comma-separated rows with a mandatory header.
class Writer {
public:
  Writer(std::ostream& out, const std::vector<std::string>& header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

private:
  void write(const Cell* first, std::size_t count);

  std::ostream& out_;
  std::size_t width_;
};

} // namespace batchq::csv

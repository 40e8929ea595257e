#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace rmest::tools {

/// One CSV cell: empty, a number (17 significant digits), an integer or text.
using Cell = std::variant<std::monostate, double, long long, std::string>;

/// Column-named table written as RFC-4180 CSV.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Index of a column; throws std::out_of_range for unknown names.
  std::size_t column(const std::string& name) const;
  const Cell& at(std::size_t row, const std::string& name) const;
  /// Numeric value of a cell (NaN for empty cells).
  double number(std::size_t row, const std::string& name) const;
  std::string text(std::size_t row, const std::string& name) const;

  /// Stable lexicographic sort on the named key columns. Empty cells sort first,
  /// numbers compare numerically and text lexicographically.
  void sort(const std::vector<std::string>& keys);

  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_cell(const Cell& cell);

}  // namespace rmest::tools

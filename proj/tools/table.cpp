#include "table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rmest::tools {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

int rank(const Cell& c) { return static_cast<int>(c.index()); }

bool less(const Cell& a, const Cell& b) {
  const bool a_num = std::holds_alternative<double>(a) || std::holds_alternative<long long>(a);
  const bool b_num = std::holds_alternative<double>(b) || std::holds_alternative<long long>(b);
  if (a_num && b_num) {
    auto value = [](const Cell& c) {
      return std::holds_alternative<double>(c) ? std::get<double>(c)
                                               : static_cast<double>(std::get<long long>(c));
    };
    return value(a) < value(b);
  }
  if (rank(a) != rank(b)) return rank(a) < rank(b);
  if (std::holds_alternative<std::string>(a)) return std::get<std::string>(a) < std::get<std::string>(b);
  return false;
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "";
  if (const auto* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return quote(std::get<std::string>(cell));
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("Table::add: row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::out_of_range("Table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

const Cell& Table::at(std::size_t row, const std::string& name) const {
  return rows_.at(row).at(column(name));
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = at(row, name);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  return std::numeric_limits<double>::quiet_NaN();
}

std::string Table::text(std::size_t row, const std::string& name) const {
  const Cell& c = at(row, name);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return format_cell(c);
}

void Table::sort(const std::vector<std::string>& keys) {
  std::vector<std::size_t> idx;
  for (const auto& k : keys) idx.push_back(column(k));
  std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& a, const auto& b) {
    for (std::size_t i : idx) {
      if (less(a[i], b[i])) return true;
      if (less(b[i], a[i])) return false;
    }
    return false;
  });
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << quote(columns_[i]);
  }
  out << "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << "\r\n";
  }
}

}  // namespace rmest::tools

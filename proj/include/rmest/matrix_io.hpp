#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rmest/linalg.hpp"

namespace rmest {

/// "a+bi" with 17 significant digits per part; purely real values print as "a".
std::string format_complex(Complex z);

/// Parses "a", "a+bi", "a-bi", "bi", "i", "-i" (surrounding blanks allowed).
/// Throws ParseError(line) on malformed input.
Complex parse_complex(std::string_view text, std::size_t line = 0);

/// Matrix CSV: one row per variable, one column per sample. Lines that are
/// empty or start with '#' are ignored. Rows must have equal length.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Splits one CSV record on commas (no quoting; numeric payloads only).
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace rmest

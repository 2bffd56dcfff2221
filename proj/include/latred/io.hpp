#pragma once

// Bracketed integer-matrix text, as used by NTL and the SVP challenge:
//   matrix  := '[' row* ']'
//   row     := '[' integer (ws integer)* ']'
//   integer := '-'? digit+
// Whitespace is allowed between all tokens.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "latred/basis.hpp"
#include "latred/errors.hpp"

namespace latred {

namespace detail {

class MatrixReader {
 public:
  explicit MatrixReader(std::istream& in) : in_(in) {}

  Basis read() {
    skip_ws();
    expect('[', "expected '[' opening the matrix");
    std::vector<IntVector> rows;
    for (;;) {
      skip_ws();
      const int c = in_.peek();
      if (c == ']') {
        get();
        break;
      }
      if (c == '[') {
        const std::size_t row_line = line_, row_col = col_;
        IntVector row = read_row();
        if (!rows.empty() && row.size() != rows.front().size())
          throw ParseError("ragged matrix: row " + std::to_string(rows.size() + 1) + " has " +
                               std::to_string(row.size()) + " entries, expected " +
                               std::to_string(rows.front().size()),
                           row_line, row_col);
        rows.push_back(std::move(row));
        continue;
      }
      if (c == EOF) throw ParseError("unbalanced brackets: missing ']' closing the matrix", line_, col_);
      fail_token("expected '[' or ']'");
    }
    if (rows.empty()) throw ParseError("empty matrix", line_, col_);
    skip_ws();
    if (in_.peek() != EOF) fail_token("trailing characters after the matrix");
    if (rows.size() > rows.front().size())
      throw ParseError("more rows than columns; rows must be basis vectors", line_, col_);
    return Basis(std::move(rows));
  }

 private:
  IntVector read_row() {
    expect('[', "expected '['");
    IntVector row;
    std::string digits;
    for (;;) {
      skip_ws();
      const int c = in_.peek();
      if (c == ']') {
        if (row.empty()) throw ParseError("empty row", line_, col_);
        get();
        break;
      }
      if (c == EOF) throw ParseError("unbalanced brackets: missing ']' closing a row", line_, col_);
      if (c == '[') fail_token("unbalanced brackets: '[' inside a row");
      const std::size_t tl = line_, tc = col_;
      digits.clear();
      if (c == '-') digits.push_back(static_cast<char>(get()));
      while (std::isdigit(in_.peek())) digits.push_back(static_cast<char>(get()));
      const int after = in_.peek();
      if (digits.empty() || digits == "-" ||
          !(after == ']' || after == EOF || std::isspace(after)))
        throw ParseError("malformed integer token", tl, tc);
      row.emplace_back(digits, 10);
    }
    return row;
  }

  void expect(char want, const char* msg) {
    if (in_.peek() != want) fail_token(msg);
    get();
  }

  [[noreturn]] void fail_token(const std::string& msg) {
    const int c = in_.peek();
    std::string shown = c == EOF ? "end of input" : std::string("'") + static_cast<char>(c) + "'";
    throw ParseError(msg + ", found " + shown, line_, col_);
  }

  int get() {
    const int c = in_.get();
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if (c != EOF) {
      ++col_;
    }
    return c;
  }

  void skip_ws() {
    while (std::isspace(in_.peek())) get();
  }

  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace detail

inline Basis parse_basis(std::istream& in) { return detail::MatrixReader(in).read(); }

inline Basis parse_basis(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_basis(in);
}

inline void write_basis(std::ostream& out, const Basis& b) {
  out << '[';
  for (const auto& row : b.rows()) {
    out << '[';
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << row[j].get_str();
    }
    out << "]\n";
  }
  out << ']';
}

/// Canonical form: "[" then one "[a b c]" per line, then "]".
inline std::string write_basis(const Basis& b) {
  std::ostringstream out;
  write_basis(out, b);
  return out.str();
}

/// Reads a basis file; "-" is stdin.
inline Basis read_basis_file(const std::string& path) {
  if (path == "-") return parse_basis(std::cin);
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_basis(in);
}

/// Writes a basis file followed by a newline; "-" is stdout.
inline void write_basis_file(const std::string& path, const Basis& b) {
  if (path == "-") {
    write_basis(std::cout, b);
    std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_basis(out, b);
  out << '\n';
}

}  // namespace latred

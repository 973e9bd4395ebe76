#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polycore/rational.hpp"

namespace gainscope::poly {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Parses expressions such as `3.5*t1^2*t2 - 1.0` or `-t1/(1+t2)`. Only
// identifiers in `allowed` are accepted; the result is aligned to `allowed`.
// `line` and `column_offset` locate the text inside a larger file for errors.
RationalFunction parse_rational(std::string_view text, const std::vector<std::string>& allowed, int line = 1,
                                int column_offset = 0);

// As parse_rational, but rejects non-constant denominators.
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& allowed, int line = 1,
                            int column_offset = 0);

}  // namespace gainscope::poly

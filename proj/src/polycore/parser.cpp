#include "polycore/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace gainscope::poly {

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const std::vector<std::string>& allowed, int line, int col0)
      : text_(text), allowed_(allowed), line_(line), col0_(col0) {}

  RationalFunction parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    auto r = expr();
    skip_ws();
    if (pos_ < text_.size()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    return r.aligned(merge_vars(r.vars(), allowed_));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col0_ + static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalFunction expr() {
    RationalFunction acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  RationalFunction term() {
    RationalFunction acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const auto at = pos_;
        auto d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  RationalFunction unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  RationalFunction power() {
    RationalFunction base = primary();
    if (accept('^')) {
      skip_ws();
      const auto start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      const int k = std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
      RationalFunction r = RationalFunction::constant(1.0);
      for (int i = 0; i < k; ++i) r = r * base;
      return r;
    }
    return base;
  }

  RationalFunction primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto r = expr();
      if (!accept(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  RationalFunction number() {
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      auto save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return RationalFunction::constant(v);
  }

  RationalFunction identifier() {
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    for (const auto& a : allowed_) {
      if (a == name) return RationalFunction(Polynomial::variable(name));
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& allowed_;
  int line_;
  int col0_;
  std::size_t pos_ = 0;
};

}  // namespace

RationalFunction parse_rational(std::string_view text, const std::vector<std::string>& allowed, int line,
                                int column_offset) {
  return ExprParser(text, allowed, line, column_offset).parse();
}

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& allowed, int line,
                            int column_offset) {
  auto r = parse_rational(text, allowed, line, column_offset);
  if (!r.is_polynomial()) throw ParseError("expected a polynomial, found a rational expression", line, column_offset + 1);
  return r.as_polynomial().aligned(merge_vars(r.vars(), allowed));
}

}  // namespace gainscope::poly

#include "hardylab/grammar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "hardylab/format.hpp"

namespace hardylab {

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  bool consume_word(std::string_view word) {
    skip_ws();
    if (text.substr(pos, word.size()) != word) return false;
    pos += word.size();
    return true;
  }

  double number_atom() {
    skip_ws();
    double value = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) throw ParseError("expected a number", pos);
    pos += static_cast<std::size_t>(ptr - first);
    return value;
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    double num = number_atom();
    skip_ws();
    if (pos < text.size() && text[pos] == '/') {
      ++pos;
      std::size_t denom_pos = pos;
      double den = number_atom();
      if (den == 0.0) throw ParseError("zero denominator", denom_pos);
      num /= den;
    }
    if (!std::isfinite(num)) throw ParseError("exponent must be finite", start);
    return num;
  }

  MeanExpr expr() {
    skip_ws();
    if (consume_word("P")) {
      expect('[');
      double p = number();
      expect(']');
      return MeanExpr::power(p);
    }
    if (consume_word("circ")) {
      expect('(');
      MeanExpr outer = expr();
      expect(',');
      MeanExpr inner = expr();
      expect(')');
      return MeanExpr::circ(std::move(outer), std::move(inner));
    }
    if (consume_word("sq")) {
      expect('(');
      MeanExpr outer = expr();
      expect(',');
      MeanExpr inner = expr();
      expect(')');
      return MeanExpr::square(std::move(outer), std::move(inner));
    }
    throw ParseError("expected P[...], circ(...) or sq(...)", pos);
  }
};

}  // namespace

MeanExpr parse_mean(std::string_view text) {
  Parser parser{text};
  MeanExpr e = parser.expr();
  parser.skip_ws();
  if (parser.pos != text.size()) throw ParseError("trailing characters", parser.pos);
  return e;
}

std::string to_string(const MeanExpr& e) {
  switch (e.kind()) {
    case MeanExpr::Kind::Power:
      return "P[" + shortest_double(e.exponent()) + "]";
    case MeanExpr::Kind::Circ:
      return "circ(" + to_string(e.outer()) + "," + to_string(e.inner()) + ")";
    case MeanExpr::Kind::Square:
    default:
      return "sq(" + to_string(e.outer()) + "," + to_string(e.inner()) + ")";
  }
}

}  // namespace hardylab

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/matrix.hpp"

namespace ggeft {

// Real linear combination of Pauli strings over {I,X,Y,Z}^n_sites.
// Canonical form: terms sorted lexicographically by string, duplicates merged,
// zero coefficients dropped.
struct PauliExpr {
  struct Term {
    double coeff = 0.0;
    std::string word;  // length n_sites, letters from {I,X,Y,Z}
  };
  std::vector<Term> terms;
  int n_sites = 0;

  bool operator==(const PauliExpr &o) const {
    if (n_sites != o.n_sites || terms.size() != o.terms.size()) return false;
    for (size_t k = 0; k < terms.size(); ++k)
      if (terms[k].word != o.terms[k].word || terms[k].coeff != o.terms[k].coeff) return false;
    return true;
  }
};

struct PauliParseError : std::runtime_error {
  PauliParseError(size_t offset_, const std::string &msg)
      : std::runtime_error("offset " + std::to_string(offset_) + ": " + msg), offset(offset_) {}
  size_t offset;
};

namespace detail {

inline void canonicalize(PauliExpr &e) {
  std::map<std::string, double> merged;
  for (const auto &t : e.terms) merged[t.word] += t.coeff;
  e.terms.clear();
  for (const auto &[word, c] : merged)
    if (c != 0.0) e.terms.push_back({c, word});
}

}  // namespace detail

// Grammar: expr := ['-'] term (('+'|'-') term)* ; term := [number '*'] pauli-string ;
// pauli-string := n_sites letters from {I,X,Y,Z} ; number := decimal literal,
// optional scientific notation. Whitespace is insignificant. The optional
// leading '-' (beyond the spec grammar) is accepted so that formatted
// expressions with a negative first coefficient re-parse.
inline PauliExpr parse_pauli_expr(const std::string &text, int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("parse_pauli_expr: n_sites must be >= 1");
  PauliExpr e;
  e.n_sites = n_sites;

  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto is_pauli_letter = [](char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; };

  skip_ws();
  if (pos == text.size()) throw PauliParseError(pos, "empty input");

  double sign = 1.0;
  if (text[pos] == '-') {
    sign = -1.0;
    ++pos;
  }

  while (true) {
    skip_ws();
    const size_t term_start = pos;
    if (pos == text.size()) throw PauliParseError(pos, "expected term");

    double coeff = 1.0;
    char c = text[pos];
    const bool signed_number =
        (c == '-' || c == '+') && pos + 1 < text.size() &&
        (std::isdigit(static_cast<unsigned char>(text[pos + 1])) || text[pos + 1] == '.');
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || signed_number) {
      const char *begin = text.c_str() + pos;
      char *end = nullptr;
      coeff = std::strtod(begin, &end);
      if (end == begin) throw PauliParseError(pos, "malformed number");
      pos += static_cast<size_t>(end - begin);
      skip_ws();
      if (pos == text.size() || text[pos] != '*')
        throw PauliParseError(pos, "expected '*' after coefficient");
      ++pos;
      skip_ws();
    } else if (!is_pauli_letter(c)) {
      throw PauliParseError(pos, std::string("unknown letter '") + c + "'");
    }

    const size_t word_start = pos;
    std::string word;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '+' && text[pos] != '-') {
      if (!is_pauli_letter(text[pos]))
        throw PauliParseError(pos, std::string("unknown letter '") + text[pos] + "'");
      word.push_back(text[pos]);
      ++pos;
    }
    if (word.empty()) throw PauliParseError(word_start, "expected Pauli string");
    if (static_cast<int>(word.size()) != n_sites)
      throw PauliParseError(term_start, "wrong string length (got " +
                                            std::to_string(word.size()) + ", expected " +
                                            std::to_string(n_sites) + ")");
    e.terms.push_back({sign * coeff, word});

    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] == '+')
      sign = 1.0;
    else if (text[pos] == '-')
      sign = -1.0;
    else
      throw PauliParseError(pos, std::string("unexpected character '") + text[pos] + "'");
    ++pos;
  }

  detail::canonicalize(e);
  return e;
}

// Canonical text form; parse(format(e)) == e.
inline std::string format_pauli_expr(const PauliExpr &e) {
  if (e.terms.empty()) return std::string("0*") + std::string(e.n_sites, 'I');
  std::string out;
  char buf[64];
  for (size_t k = 0; k < e.terms.size(); ++k) {
    const auto &t = e.terms[k];
    const double mag = std::abs(t.coeff);
    if (k == 0)
      out += (t.coeff < 0.0) ? "-" : "";
    else
      out += (t.coeff < 0.0) ? " - " : " + ";
    if (mag != 1.0) {
      std::snprintf(buf, sizeof buf, "%.17g", mag);
      out += buf;
      out += "*";
    }
    out += t.word;
  }
  return out;
}

namespace detail {

inline ComplexMatrix pauli_letter(char c) {
  ComplexMatrix m(2);
  switch (c) {
    case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw std::invalid_argument("pauli_letter: bad letter");
  }
  return m;
}

}  // namespace detail

// sum over terms of coeff * (P_1 (x) ... (x) P_n), leftmost letter = first
// tensor factor. Hermitian by construction (real coefficients).
inline HermitianOperator expr_to_matrix(const PauliExpr &e, const std::string &label = "") {
  if (e.n_sites > 6) throw std::invalid_argument("expr_to_matrix: dimension cap exceeded (n_sites > 6)");
  const int dim = 1 << e.n_sites;
  ComplexMatrix acc(dim);
  for (const auto &t : e.terms) {
    ComplexMatrix m = detail::pauli_letter(t.word[0]);
    for (int s = 1; s < e.n_sites; ++s) m = tensor(m, detail::pauli_letter(t.word[s]));
    acc += t.coeff * m;
  }
  return HermitianOperator(std::move(acc), label.empty() ? format_pauli_expr(e) : label);
}

}  // namespace ggeft

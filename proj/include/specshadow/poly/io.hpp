#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specshadow/error.hpp"
#include "specshadow/poly/polynomial.hpp"

namespace specshadow {

using json = nlohmann::json;

inline std::vector<std::string> parse_vars(const json& doc) {
  require(doc.is_object() && doc.contains("vars") && doc["vars"].is_array(),
          "document needs a \"vars\" array");
  std::vector<std::string> vars;
  for (const auto& v : doc["vars"]) {
    require(v.is_string() && !v.get<std::string>().empty(),
            "variable names must be nonempty strings");
    vars.push_back(v.get<std::string>());
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      require(vars[i] != vars[j], "duplicate variable name '" + vars[i] + "'");
    }
  }
  return vars;
}

inline std::string coefficient_string(const json& c) {
  if (c.is_string()) {
    return c.get<std::string>();
  }
  require(c.is_number_integer(), "coefficients must be strings or integers");
  return std::to_string(c.get<long long>());
}

/// Reads {"terms":[{"c":"-1","e":[4,0]}, ...]} against a known
/// variable list. The document's own "vars" entry, when present, must
/// agree with `vars`.
template <Coefficient F>
Polynomial<F> polynomial_from_json(const json& doc, const std::vector<std::string>& vars) {
  require(doc.is_object(), "polynomial document must be an object");
  if (doc.contains("vars")) {
    require(parse_vars(doc) == vars, "polynomial variables disagree with context");
  }
  require(doc.contains("terms") && doc["terms"].is_array(),
          "polynomial document needs a \"terms\" array");
  Polynomial<F> p(vars);
  for (const auto& t : doc["terms"]) {
    require(t.is_object() && t.contains("c") && t.contains("e") && t["e"].is_array(),
            "each term needs \"c\" and \"e\"");
    std::vector<int> e;
    for (const auto& x : t["e"]) {
      require(x.is_number_integer(), "exponents must be integers");
      require(x.get<long long>() >= 0, "negative exponent");
      e.push_back(x.get<int>());
    }
    require(e.size() == vars.size(), "exponent vector arity mismatch");
    p.add_term(Monomial(std::move(e)), ScalarTraits<F>::parse(coefficient_string(t["c"])));
  }
  return p;
}

/// Reads a standalone polynomial document (with its own "vars").
template <Coefficient F>
Polynomial<F> polynomial_from_json(const json& doc) {
  return polynomial_from_json<F>(doc, parse_vars(doc));
}

template <Coefficient F>
json polynomial_to_json(const Polynomial<F>& p, bool with_vars = true) {
  json doc;
  if (with_vars) {
    doc["vars"] = p.vars();
  }
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> e(m.exponents().begin(), m.exponents().end());
    terms.push_back({{"c", to_string(c)}, {"e", e}});
  }
  doc["terms"] = std::move(terms);
  return doc;
}

namespace detail {

template <Coefficient F>
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  Polynomial<F> parse() {
    Polynomial<F> p = expr();
    skip_space();
    require(pos_ == text_.size(), error("unexpected input"));
    return p;
  }

 private:
  std::string error(const std::string& what) const {
    return what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'";
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek(char ch) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == ch;
  }

  Polynomial<F> expr() {
    Polynomial<F> acc(vars_);
    bool first = true;
    while (true) {
      skip_space();
      F sign = ScalarTraits<F>::one();
      if (peek('+') || peek('-')) {
        if (text_[pos_] == '-') {
          sign = -sign;
        }
        ++pos_;
      } else if (!first) {
        return acc;
      }
      acc += term().scaled(sign);
      first = false;
    }
  }

  bool starts_factor() {
    skip_space();
    if (pos_ >= text_.size()) {
      return false;
    }
    char ch = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '(' ||
           match_var() >= 0;
  }

  Polynomial<F> term() {
    Polynomial<F> acc = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc *= factor();
      } else if (peek('/')) {
        ++pos_;
        const Polynomial<F> den = factor();
        require(den.degree() == 0, error("can only divide by a nonzero constant"));
        acc = acc.scaled(ScalarTraits<F>::one() / den.coefficient(Monomial::one(vars_.size())));
      } else if (starts_factor()) {
        acc *= factor();
      } else {
        return acc;
      }
    }
  }

  int match_var() const {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const auto& v = vars_[k];
      if (v.size() > best_len && text_.substr(pos_, v.size()) == v) {
        best = static_cast<int>(k);
        best_len = v.size();
      }
    }
    return best;
  }

  unsigned exponent() {
    if (!peek('^')) {
      return 1;
    }
    ++pos_;
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    require(pos_ > start, error("expected a nonnegative integer exponent"));
    return static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
  }

  Polynomial<F> factor() {
    skip_space();
    require(pos_ < text_.size(), error("unexpected end of expression"));
    Polynomial<F> base(vars_);
    char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      base = expr();
      require(peek(')'), error("expected ')'"));
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
      base = Polynomial<F>::constant(
          vars_, ScalarTraits<F>::parse(text_.substr(start, pos_ - start)));
    } else {
      int k = match_var();
      require(k >= 0, error("unknown symbol"));
      pos_ += vars_[static_cast<std::size_t>(k)].size();
      base = Polynomial<F>::variable(vars_, static_cast<std::size_t>(k));
    }
    return base.pow(exponent());
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Inline expressions such as "Y-3X+2" or "(X-1)^2*(X+1) - 1/2*Y".
/// Accepts + - * / ^ (division by constants only), parentheses, integer/decimal/p/q literals and the
/// declared variable names (longest match; juxtaposition multiplies).
template <Coefficient F>
Polynomial<F> parse_expression(std::string_view text, const std::vector<std::string>& vars) {
  return detail::ExpressionParser<F>(text, vars).parse();
}

}  // namespace specshadow

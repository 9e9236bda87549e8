#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "specshadow/error.hpp"

namespace specshadow {

/// Exponent vector over a fixed ordered list of variables.
///
/// Monomials are totally ordered by graded lexicographic order: lower
/// total degree first, ties broken so that a larger exponent on an
/// earlier variable comes first (1 < X < Y < X^2 < XY < Y^2 for X > Y).
/// Gram matrices are indexed in this order everywhere.
class Monomial {
 public:
  Monomial() = default;

  explicit Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_) {
      require(e >= 0, "negative exponent in monomial");
    }
    degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
  }

  static Monomial one(std::size_t arity) {
    return Monomial(std::vector<int>(arity, 0));
  }

  static Monomial variable(std::size_t arity, std::size_t k, int power = 1) {
    std::vector<int> e(arity, 0);
    e.at(k) = power;
    return Monomial(std::move(e));
  }

  std::size_t arity() const { return exps_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t k) const { return exps_[k]; }
  std::span<const int> exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const {
    require(arity() == other.arity(), "monomial arity mismatch");
    std::vector<int> e(exps_);
    for (std::size_t k = 0; k < e.size(); ++k) {
      e[k] += other.exps_[k];
    }
    return Monomial(std::move(e));
  }

  /// Same monomial with the exponent of variable k changed.
  Monomial with_exponent(std::size_t k, int e) const {
    std::vector<int> out(exps_);
    out.at(k) = e;
    return Monomial(std::move(out));
  }

  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

  std::strong_ordering operator<=>(const Monomial& other) const {
    if (auto c = degree_ <=> other.degree_; c != 0) {
      return c;
    }
    // Reverse lexicographic on exponents: X (1,0) precedes Y (0,1).
    return other.exps_ <=> exps_;
  }

  std::string to_string(std::span<const std::string> vars) const {
    std::string out;
    for (std::size_t k = 0; k < exps_.size(); ++k) {
      if (exps_[k] == 0) {
        continue;
      }
      if (!out.empty()) {
        out += "*";
      }
      out += k < vars.size() ? vars[k] : "x" + std::to_string(k + 1);
      if (exps_[k] > 1) {
        out += "^" + std::to_string(exps_[k]);
      }
    }
    return out.empty() ? "1" : out;
  }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

namespace detail {

inline void compositions(std::size_t n, int total, std::size_t pos,
                         std::vector<int>& cur, std::vector<Monomial>& out) {
  if (pos + 1 == n) {
    cur[pos] = total;
    out.emplace_back(cur);
    return;
  }
  for (int e = total; e >= 0; --e) {
    cur[pos] = e;
    compositions(n, total - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace detail

/// All monomials in n variables of degree at most d, in graded lex
/// order. Size is binomial(n + d, d).
inline std::vector<Monomial> monomial_basis(std::size_t n, int d) {
  require(n >= 1, "monomial_basis needs at least one variable");
  require(d >= 0, "monomial_basis needs a nonnegative degree");
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  for (int total = 0; total <= d; ++total) {
    detail::compositions(n, total, 0, cur, out);
  }
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) {
    return 0;
  }
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

}  // namespace specshadow

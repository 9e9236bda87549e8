#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specshadow/error.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/scalar.hpp"

namespace specshadow {

/// Sparse multivariate polynomial over a fixed ordered variable list.
///
/// The coefficient type fixes the mode: `Polynomial<Rational>` never
/// rounds, `Polynomial<double>` uses binary64 arithmetic. Mixing modes
/// does not compile; convert explicitly with `cast`. No stored term has
/// a zero coefficient.
template <Coefficient F>
class Polynomial {
 public:
  using Scalar = F;
  using Terms = std::map<Monomial, F>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  Polynomial(std::vector<std::string> vars, const Terms& terms)
      : vars_(std::move(vars)) {
    for (const auto& [m, c] : terms) {
      add_term(m, c);
    }
  }

  static Polynomial constant(std::vector<std::string> vars, const F& c) {
    Polynomial p(std::move(vars));
    p.add_term(Monomial::one(p.arity()), c);
    return p;
  }

  static Polynomial variable(std::vector<std::string> vars, std::size_t k) {
    Polynomial p(std::move(vars));
    require(k < p.arity(), "variable index out of range");
    p.add_term(Monomial::variable(p.arity(), k), ScalarTraits<F>::one());
    return p;
  }

  /// Affine polynomial c0 + sum_k c[k] * var_k.
  static Polynomial affine(std::vector<std::string> vars, const F& c0,
                           std::span<const F> lin) {
    Polynomial p(std::move(vars));
    require(lin.size() == p.arity(), "affine coefficient count mismatch");
    p.add_term(Monomial::one(p.arity()), c0);
    for (std::size_t k = 0; k < lin.size(); ++k) {
      p.add_term(Monomial::variable(p.arity(), k), lin[k]);
    }
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t arity() const { return vars_.size(); }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Maximum term degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  F coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ScalarTraits<F>::zero() : it->second;
  }

  void add_term(const Monomial& m, const F& c) {
    require(m.arity() == arity(), "monomial arity does not match variables");
    if (specshadow::is_zero(c)) {
      return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (specshadow::is_zero(it->second)) {
        terms_.erase(it);
      }
    }
  }

  Polynomial& operator+=(const Polynomial& q) {
    check_compatible(q);
    for (const auto& [m, c] : q.terms_) {
      add_term(m, c);
    }
    return *this;
  }

  Polynomial& operator-=(const Polynomial& q) {
    check_compatible(q);
    for (const auto& [m, c] : q.terms_) {
      add_term(m, -c);
    }
    return *this;
  }

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }

  Polynomial operator-() const { return scaled(-ScalarTraits<F>::one()); }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    p.check_compatible(q);
    Polynomial r(p.vars_);
    for (const auto& [mp, cp] : p.terms_) {
      for (const auto& [mq, cq] : q.terms_) {
        r.add_term(mp * mq, cp * cq);
      }
    }
    return r;
  }

  Polynomial& operator*=(const Polynomial& q) { return *this = *this * q; }

  Polynomial scaled(const F& s) const {
    Polynomial r(vars_);
    if (specshadow::is_zero(s)) {
      return r;
    }
    for (const auto& [m, c] : terms_) {
      r.terms_.emplace(m, c * s);
    }
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial r = constant(vars_, ScalarTraits<F>::one());
    for (unsigned i = 0; i < e; ++i) {
      r *= *this;
    }
    return r;
  }

  /// Exact in exact mode, plain binary64 otherwise.
  F evaluate(std::span<const F> x) const {
    require(x.size() == arity(), "evaluation point arity mismatch");
    F total = ScalarTraits<F>::zero();
    for (const auto& [m, c] : terms_) {
      F v = c;
      for (std::size_t k = 0; k < x.size(); ++k) {
        for (int e = 0; e < m[k]; ++e) {
          v *= x[k];
        }
      }
      total += v;
    }
    return total;
  }

  F evaluate(const std::vector<F>& x) const { return evaluate(std::span<const F>(x)); }

  /// Floating evaluation regardless of mode.
  double evaluate_double(std::span<const double> x) const {
    require(x.size() == arity(), "evaluation point arity mismatch");
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
      double v = to_double(c);
      for (std::size_t k = 0; k < x.size(); ++k) {
        for (int e = 0; e < m[k]; ++e) {
          v *= x[k];
        }
      }
      total += v;
    }
    return total;
  }

  Polynomial derivative(std::size_t k) const {
    require(k < arity(), "derivative variable out of range");
    Polynomial r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m[k] == 0) {
        continue;
      }
      r.add_term(m.with_exponent(k, m[k] - 1), c * F(m[k]));
    }
    return r;
  }

  std::vector<Polynomial> gradient() const {
    std::vector<Polynomial> g;
    g.reserve(arity());
    for (std::size_t k = 0; k < arity(); ++k) {
      g.push_back(derivative(k));
    }
    return g;
  }

  /// Largest absolute coefficient; zero for the zero polynomial.
  F max_abs_coefficient() const {
    F best = ScalarTraits<F>::zero();
    for (const auto& [m, c] : terms_) {
      F a = abs_value(c);
      if (a > best) {
        best = a;
      }
    }
    return best;
  }

  template <Coefficient G>
  Polynomial<G> cast() const {
    Polynomial<G> r(vars_);
    for (const auto& [m, c] : terms_) {
      if constexpr (std::is_same_v<G, F>) {
        r.add_term(m, c);
      } else if constexpr (std::is_same_v<G, double>) {
        r.add_term(m, to_double(c));
      } else {
        r.add_term(m, exact_rational(c));
      }
    }
    return r;
  }

  bool operator==(const Polynomial& q) const {
    return vars_ == q.vars_ && terms_ == q.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) {
      return "0";
    }
    std::string out;
    // Highest degree first reads naturally.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      const bool negative = c < 0;
      const F mag = abs_value(c);
      if (out.empty()) {
        out += negative ? "-" : "";
      } else {
        out += negative ? " - " : " + ";
      }
      const bool unit = mag == ScalarTraits<F>::one();
      if (m.degree() == 0) {
        out += specshadow::to_string(mag);
      } else if (unit) {
        out += m.to_string(vars_);
      } else {
        out += specshadow::to_string(mag) + "*" + m.to_string(vars_);
      }
    }
    return out;
  }

 private:
  void check_compatible(const Polynomial& q) const {
    require(vars_ == q.vars_, "polynomials are over different variable lists");
  }

  std::vector<std::string> vars_;
  Terms terms_;
};

using QPoly = Polynomial<Rational>;
using FPoly = Polynomial<double>;

}  // namespace specshadow

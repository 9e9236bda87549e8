#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "specshadow/error.hpp"
#include "specshadow/poly/polynomial.hpp"

namespace specshadow {

/// Rewrite rule var^power -> replacement.
template <Coefficient F>
struct ReductionRule {
  std::size_t var = 0;
  int power = 1;
  Polynomial<F> replacement;
};

/// A terminating set of single-variable power rules, e.g. s^2 -> 1 - c^2
/// or t^2 -> 1/2 for an adjoined square root.
///
/// Accepted rule sets satisfy: at most one rule per variable, each
/// replacement has degree < power in its own variable, and the graph
/// "rule variable v mentions rule variable w" (ignoring v itself) is
/// acyclic. Together these guarantee termination.
template <Coefficient F>
class RuleSet {
 public:
  RuleSet() = default;

  explicit RuleSet(std::vector<ReductionRule<F>> rules) : rules_(std::move(rules)) {
    validate();
  }

  const std::vector<ReductionRule<F>>& rules() const { return rules_; }

  Polynomial<F> reduce(const Polynomial<F>& p) const {
    for (const auto& r : rules_) {
      require(r.replacement.vars() == p.vars(),
              "reduction rule and polynomial use different variables");
    }
    Polynomial<F> current = p;
    while (true) {
      std::optional<std::pair<Monomial, F>> hit;
      const ReductionRule<F>* rule = nullptr;
      for (const auto& [m, c] : current.terms()) {
        for (const auto& r : rules_) {
          if (m[r.var] >= r.power) {
            hit.emplace(m, c);
            rule = &r;
            break;
          }
        }
        if (hit) {
          break;
        }
      }
      if (!hit) {
        return current;
      }
      const auto& [m, c] = *hit;
      Polynomial<F> cofactor(p.vars());
      cofactor.add_term(m.with_exponent(rule->var, m[rule->var] - rule->power), c);
      Polynomial<F> removed(p.vars());
      removed.add_term(m, c);
      current -= removed;
      current += cofactor * rule->replacement;
    }
  }

 private:
  void validate() const {
    const std::size_t n = rules_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = rules_[i];
      require(r.power >= 1, "reduction rule power must be positive");
      require(r.var < r.replacement.arity(), "reduction rule variable out of range");
      for (std::size_t j = 0; j < i; ++j) {
        require(rules_[j].var != r.var, "two reduction rules for one variable");
        require(rules_[j].replacement.vars() == r.replacement.vars(),
                "reduction rules use different variables");
      }
      for (const auto& [m, c] : r.replacement.terms()) {
        require(m[r.var] < r.power,
                "reduction rule does not decrease its variable's exponent");
      }
    }
    // Cycle check on the mention graph by repeated leaf removal.
    std::vector<bool> removed(n, false);
    for (std::size_t round = 0; round < n; ++round) {
      bool progress = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (removed[i]) {
          continue;
        }
        bool leaf = true;
        for (std::size_t j = 0; j < n && leaf; ++j) {
          if (j == i || removed[j]) {
            continue;
          }
          for (const auto& [m, c] : rules_[i].replacement.terms()) {
            if (m[rules_[j].var] > 0) {
              leaf = false;
              break;
            }
          }
        }
        if (leaf) {
          removed[i] = true;
          progress = true;
        }
      }
      if (!progress) {
        break;
      }
    }
    for (bool r : removed) {
      require(r, "reduction rules form a cycle and may not terminate");
    }
  }

  std::vector<ReductionRule<F>> rules_;
};

/// Normal form of p under the rules.
template <Coefficient F>
Polynomial<F> reduce_mod_rules(const Polynomial<F>& p, const RuleSet<F>& rules) {
  return rules.reduce(p);
}

}  // namespace specshadow

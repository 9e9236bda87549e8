#pragma once

#include <map>
#include <string>
#include <vector>

#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/relax/certificate.hpp"
#include "specshadow/sdp/problem.hpp"
#include "specshadow/sdp/solver.hpp"

namespace specshadow {

/// Builds the coefficient-matching SDP
///
///   sum_b (v_b^T G_b v_b) * m_b + sum_k x_k q_k = target,   G_b ⪰ 0,
///
/// one equality per monomial. Gram blocks carry a polynomial multiplier
/// m_b, free scalars x_k a fixed polynomial q_k.
class GramSystem {
 public:
  explicit GramSystem(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  int add_gram(std::vector<Monomial> basis, const QPoly& multiplier) {
    const int blk = prob_.add_block(static_cast<int>(basis.size()));
    const FPoly mult = multiplier.cast<double>();
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = a; b < basis.size(); ++b) {
        const Monomial ab = basis[a] * basis[b];
        for (const auto& [m, c] : mult.terms()) {
          const int r = row(ab * m);
          prob_.add_block_coefficient(r, blk, static_cast<int>(a), static_cast<int>(b),
                                      a == b ? c : 2.0 * c);
        }
      }
    }
    blocks_.push_back({multiplier, std::move(basis), SymMatrix()});
    return blk;
  }

  int add_free(const QPoly& q) {
    const int var = prob_.add_free();
    const FPoly qf = q.cast<double>();
    for (const auto& [m, c] : qf.terms()) {
      prob_.add_free_coefficient(row(m), var, c);
    }
    return var;
  }

  void add_target(const QPoly& f) {
    for (const auto& [m, c] : f.terms()) {
      const int r = row(m);
      rhs_[r] += to_double(c);
      prob_.set_rhs(r, rhs_[r]);
    }
  }

  /// Adds sum_b trace(G_b) = value.
  void add_trace_normalization(double value) {
    const int r = prob_.add_constraint(value);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (std::size_t a = 0; a < blocks_[b].basis.size(); ++a) {
        prob_.add_block_coefficient(r, static_cast<int>(b), static_cast<int>(a),
                                    static_cast<int>(a), 1.0);
      }
    }
  }

  SDPProblem& problem() { return prob_; }
  const std::vector<std::string>& vars() const { return vars_; }

  /// Certificate with Grams taken from a solved problem. The caller fills
  /// ideal terms and target, then calls finish().
  GramCertificate certificate(const SDPSolution& sol, int degree) const {
    GramCertificate c;
    c.degree = degree;
    c.vars = vars_;
    c.blocks = blocks_;
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
      c.blocks[b].gram = sol.primal_blocks[b];
    }
    c.target = QPoly(vars_);
    return c;
  }

  static void finish(GramCertificate& c) {
    c.solver_residual = solver_side_residual(c);
    replay(c);
  }

 private:
  int row(const Monomial& m) {
    auto it = rows_.find(m);
    if (it != rows_.end()) {
      return it->second;
    }
    const int r = prob_.add_constraint(0.0);
    rows_.emplace(m, r);
    return r;
  }

  std::vector<std::string> vars_;
  SDPProblem prob_;
  std::map<Monomial, int> rows_;
  std::map<int, double> rhs_;
  std::vector<GramBlock> blocks_;
};

}  // namespace specshadow

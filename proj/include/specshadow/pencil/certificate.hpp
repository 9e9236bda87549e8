#pragma once

#include <string>
#include <vector>

#include "specshadow/pencil/pencil.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/relax/certificate.hpp"
#include "specshadow/sdp/sym_matrix.hpp"

namespace specshadow {

/// U ⪰ 0 with U∘B_i = l_i, U∘C_j = 0 and r = l_0 − U∘A >= 0, which shows
/// l_0 + Σ l_i X_i = r + U∘A'(X) >= 0 on the projected spectrahedron.
struct PolarCertificate {
  SymMatrix U;
  double slack = 0.0;
  /// Coefficients (l_0, l_1, ..., l_nx) of the certified affine function.
  std::vector<double> ell;
  /// max over i, j of |U∘B_i − l_i|, |U∘C_j|, and max(0, U∘A − l_0).
  double residual = 0.0;
};

inline double polar_residual(const MatrixPencil& P, const SymMatrix& U, const std::vector<double>& ell) {
  double r = std::max(0.0, U.inner(P.A()) - ell.at(0));
  for (int i = 0; i < P.nx(); ++i) {
    r = std::max(r, std::abs(U.inner(P.B(i)) - ell.at(static_cast<std::size_t>(i) + 1)));
  }
  for (int j = 0; j < P.ny(); ++j) {
    r = std::max(r, std::abs(U.inner(P.C(j))));
  }
  return r;
}

inline json polar_certificate_to_json(const PolarCertificate& c) {
  return {{"type", "polar"},
          {"U", matrix_to_json(c.U.matrix())},
          {"slack", c.slack},
          {"ell", c.ell},
          {"residual", c.residual}};
}

/// p = A'(X)∘M(X) + v^T G_σ v with M_ab = v^T G_ab v, where G_ab is the
/// (a,b) block of the big Gram G (row index a*N + α for matrix index a
/// and basis index α), and C_j∘M(X) ≡ 0 for every j.
struct PencilQMCertificate {
  int degree = 0;
  std::vector<std::string> vars;
  std::vector<Monomial> basis;
  int k = 0;
  SymMatrix G;
  SymMatrix G_sigma;
  QPoly target;
  /// max |coefficient| over the identity and the C_j∘M constraints, in
  /// floating point as solved.
  double solver_residual = 0.0;
  /// Same after replacing G and G_σ by exactly PSD rational Grams.
  double replay_residual = 0.0;
};

namespace detail {

/// M_ab(X) for all a <= b from a rational big Gram.
inline std::vector<std::vector<QPoly>> matrix_polynomial(const std::vector<std::string>& vars,
                                                         const std::vector<Monomial>& basis, int k,
                                                         const RatMatrix& G) {
  const std::size_t N = basis.size();
  std::vector<std::vector<QPoly>> M(static_cast<std::size_t>(k), std::vector<QPoly>(static_cast<std::size_t>(k), QPoly(vars)));
  for (std::size_t a = 0; a < static_cast<std::size_t>(k); ++a) {
    for (std::size_t b = a; b < static_cast<std::size_t>(k); ++b) {
      QPoly m(vars);
      for (std::size_t al = 0; al < N; ++al) {
        for (std::size_t be = 0; be < N; ++be) {
          const Rational& g = G[a * N + al][b * N + be];
          if (sgn(g) != 0) {
            m.add_term(basis[al] * basis[be], g);
          }
        }
      }
      M[a][b] = m;
      M[b][a] = m;
    }
  }
  return M;
}

inline QPoly pencil_entry(const MatrixPencil& P, const std::vector<std::string>& vars, std::size_t a, std::size_t b) {
  QPoly e = QPoly::constant(vars, P.A_exact()[a][b]);
  for (int i = 0; i < P.nx(); ++i) {
    const Rational& c = P.B_exact(i)[a][b];
    if (sgn(c) != 0) {
      e.add_term(Monomial::variable(vars.size(), static_cast<std::size_t>(i)), c);
    }
  }
  return e;
}

}  // namespace detail

/// Exact replay: round both Grams to exactly PSD rationals and return the
/// largest coefficient of p − A'∘M − σ and of every C_j∘M.
inline double replay(const MatrixPencil& P, PencilQMCertificate& c) {
  const RatMatrix Gq = rational_psd(c.G);
  const auto M = detail::matrix_polynomial(c.vars, c.basis, c.k, Gq);
  QPoly r = c.target - gram_polynomial(c.vars, c.basis, rational_psd(c.G_sigma));
  for (std::size_t a = 0; a < static_cast<std::size_t>(c.k); ++a) {
    for (std::size_t b = 0; b < static_cast<std::size_t>(c.k); ++b) {
      r -= detail::pencil_entry(P, c.vars, a, b) * M[a][b];
    }
  }
  Rational worst = r.max_abs_coefficient();
  for (int j = 0; j < P.ny(); ++j) {
    QPoly cj(c.vars);
    for (std::size_t a = 0; a < static_cast<std::size_t>(c.k); ++a) {
      for (std::size_t b = 0; b < static_cast<std::size_t>(c.k); ++b) {
        const Rational& w = P.C_exact(j)[a][b];
        if (sgn(w) != 0) {
          cj += M[a][b].scaled(w);
        }
      }
    }
    worst = std::max(worst, cj.max_abs_coefficient());
  }
  c.replay_residual = to_double(worst);
  return c.replay_residual;
}

inline json pencil_qm_certificate_to_json(const PencilQMCertificate& c) {
  json basis = json::array();
  for (const auto& m : c.basis) {
    basis.push_back(std::vector<int>(m.exponents().begin(), m.exponents().end()));
  }
  return {{"type", "pencil-quadratic-module"},
          {"degree", c.degree},
          {"vars", c.vars},
          {"k", c.k},
          {"basis", basis},
          {"target", polynomial_to_json(c.target, false)},
          {"gram", matrix_to_json(c.G.matrix())},
          {"gram_sos", matrix_to_json(c.G_sigma.matrix())},
          {"solver_residual", c.solver_residual},
          {"replay_residual", c.replay_residual}};
}

}  // namespace specshadow

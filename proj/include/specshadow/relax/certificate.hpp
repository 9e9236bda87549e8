#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specshadow/poly/io.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/sdp/sym_matrix.hpp"

namespace specshadow {

/// sigma * multiplier with sigma = v^T G v over `basis`.
struct GramBlock {
  QPoly multiplier;
  std::vector<Monomial> basis;
  SymMatrix gram;
};

/// target = sum_b (v_b^T G_b v_b) * multiplier_b + sum_j h_j g_j.
///
/// Quadratic-module certificates (one block per inequality, plus one for
/// the constant 1) have no ideal terms; Σ(d,I) certificates have a single
/// Gram block and one h_j per generator.
struct GramCertificate {
  int degree = 0;
  std::vector<std::string> vars;
  std::vector<GramBlock> blocks;
  std::vector<QPoly> generators;
  std::vector<QPoly> ideal_multipliers;  // h_j, already rational
  QPoly target;
  /// max |coefficient| of the identity residual as solved in floating point.
  double solver_residual = 0.0;
  /// Same after exact replay on rational PSD Grams (see replay()).
  double replay_residual = 0.0;
};

using QMCertificate = GramCertificate;
using SigmaCertificate = GramCertificate;

/// Exactly PSD rational approximation of a Gram matrix: factor
/// G = L L^T with L = V sqrt(max(λ, 0)), round L to dyadic rationals and
/// return L_q L_q^T computed in exact arithmetic.
inline std::vector<std::vector<Rational>> rational_psd(const SymMatrix& g, unsigned bits = 40) {
  const auto n = g.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix());
  const Eigen::MatrixXd L =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::vector<std::vector<Rational>> Lq(static_cast<std::size_t>(n),
                                        std::vector<Rational>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Lq[i][j] = dyadic_round(L(i, j), bits);
    }
  }
  std::vector<std::vector<Rational>> G(static_cast<std::size_t>(n),
                                       std::vector<Rational>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      Rational s = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        s += Lq[i][k] * Lq[j][k];
      }
      G[i][j] = s;
      G[j][i] = s;
    }
  }
  return G;
}

/// v^T G v as an exact polynomial.
inline QPoly gram_polynomial(const std::vector<std::string>& vars, const std::vector<Monomial>& basis,
                             const std::vector<std::vector<Rational>>& G) {
  QPoly s(vars);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    s.add_term(basis[a] * basis[a], G[a][a]);
    for (std::size_t b = a + 1; b < basis.size(); ++b) {
      s.add_term(basis[a] * basis[b], 2 * G[a][b]);
    }
  }
  return s;
}

/// Floating-point version used for the solver-side residual.
inline FPoly gram_polynomial(const std::vector<std::string>& vars, const std::vector<Monomial>& basis,
                             const SymMatrix& G) {
  FPoly s(vars);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    s.add_term(basis[a] * basis[a], G(a, a));
    for (std::size_t b = a + 1; b < basis.size(); ++b) {
      s.add_term(basis[a] * basis[b], 2.0 * G(a, b));
    }
  }
  return s;
}

/// Exact residual polynomial target − Σ σ_b m_b − Σ h_j g_j with the
/// Grams replaced by their rational PSD approximations.
inline QPoly replay_residual_polynomial(const GramCertificate& c) {
  QPoly r = c.target;
  for (const auto& b : c.blocks) {
    r -= gram_polynomial(c.vars, b.basis, rational_psd(b.gram)) * b.multiplier;
  }
  for (std::size_t j = 0; j < c.generators.size(); ++j) {
    r -= c.ideal_multipliers[j] * c.generators[j];
  }
  return r;
}

/// Recomputes and stores the exact replay residual; returns it.
inline double replay(GramCertificate& c) {
  c.replay_residual = to_double(replay_residual_polynomial(c).max_abs_coefficient());
  return c.replay_residual;
}

inline double solver_side_residual(const GramCertificate& c) {
  FPoly r = c.target.cast<double>();
  for (const auto& b : c.blocks) {
    r -= gram_polynomial(c.vars, b.basis, b.gram) * b.multiplier.cast<double>();
  }
  for (std::size_t j = 0; j < c.generators.size(); ++j) {
    r -= c.ideal_multipliers[j].cast<double>() * c.generators[j].cast<double>();
  }
  return r.max_abs_coefficient();
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json certificate_to_json(const GramCertificate& c) {
  json doc;
  doc["type"] = c.generators.empty() ? "quadratic-module" : "sos-modulo-ideal";
  doc["degree"] = c.degree;
  doc["vars"] = c.vars;
  doc["target"] = polynomial_to_json(c.target, false);
  doc["blocks"] = json::array();
  for (const auto& b : c.blocks) {
    json jb;
    jb["multiplier"] = polynomial_to_json(b.multiplier, false);
    json basis = json::array();
    for (const auto& m : b.basis) {
      basis.push_back(std::vector<int>(m.exponents().begin(), m.exponents().end()));
    }
    jb["basis"] = std::move(basis);
    jb["gram"] = matrix_to_json(b.gram.matrix());
    doc["blocks"].push_back(std::move(jb));
  }
  if (!c.generators.empty()) {
    doc["ideal_terms"] = json::array();
    for (std::size_t j = 0; j < c.generators.size(); ++j) {
      doc["ideal_terms"].push_back({{"generator", polynomial_to_json(c.generators[j], false)},
                                    {"multiplier", polynomial_to_json(c.ideal_multipliers[j], false)}});
    }
  }
  doc["solver_residual"] = c.solver_residual;
  doc["replay_residual"] = c.replay_residual;
  return doc;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
  require(rows.is_array(), "matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(rows[i].is_array() && static_cast<Eigen::Index>(rows[i].size()) == n,
            "matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& e = rows[i][j];
      m(i, j) = e.is_string() ? to_double(parse_rational(e.get<std::string>())) : e.get<double>();
    }
  }
  return m;
}

inline GramCertificate certificate_from_json(const json& doc) {
  GramCertificate c;
  c.vars = parse_vars(doc);
  c.degree = doc.at("degree").get<int>();
  c.target = polynomial_from_json<Rational>(doc.at("target"), c.vars);
  for (const auto& jb : doc.at("blocks")) {
    GramBlock b;
    b.multiplier = polynomial_from_json<Rational>(jb.at("multiplier"), c.vars);
    for (const auto& e : jb.at("basis")) {
      b.basis.emplace_back(e.get<std::vector<int>>());
    }
    b.gram = SymMatrix(matrix_from_json(jb.at("gram")));
    require(static_cast<std::size_t>(b.gram.dim()) == b.basis.size(), "Gram size disagrees with basis");
    c.blocks.push_back(std::move(b));
  }
  if (doc.contains("ideal_terms")) {
    for (const auto& t : doc["ideal_terms"]) {
      c.generators.push_back(polynomial_from_json<Rational>(t.at("generator"), c.vars));
      c.ideal_multipliers.push_back(polynomial_from_json<Rational>(t.at("multiplier"), c.vars));
    }
  }
  c.solver_residual = doc.value("solver_residual", 0.0);
  c.replay_residual = doc.value("replay_residual", 0.0);
  return c;
}

}  // namespace specshadow

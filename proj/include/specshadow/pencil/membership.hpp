#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specshadow/error.hpp"
#include "specshadow/pencil/certificate.hpp"
#include "specshadow/pencil/pencil.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/sdp/problem.hpp"
#include "specshadow/sdp/solver.hpp"
#include "specshadow/verdict.hpp"

namespace specshadow {

struct PencilOptions {
  SolverSettings solver{};
  /// Boundary band for membership optima.
  double tol = 1e-7;
  /// Half-width of the box bounding the existential Y (and X when
  /// searching for an interior point).
  double box = 1e3;
  /// Smallest optimal t that counts as strict feasibility.
  double strict_tol = 1e-6;
  /// Largest acceptable certificate residual.
  double certificate_tol = 1e-6;
};

enum class PencilFeasibility { Feasible, Infeasible, NotApplicable, Inaccurate };

inline const char* to_string(PencilFeasibility f) {
  switch (f) {
    case PencilFeasibility::Feasible:
      return "feasible";
    case PencilFeasibility::Infeasible:
      return "infeasible";
    case PencilFeasibility::NotApplicable:
      return "not-applicable";
    case PencilFeasibility::Inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

struct PencilPoint {
  bool member = false;
  double eigmin = 0.0;
};

struct StrictFeasibility {
  enum class Status { Witness, None, Inaccurate };
  Status status = Status::Inaccurate;
  /// Interior point (x, y) when status is Witness.
  std::vector<double> point;
  double t = 0.0;
  std::vector<std::string> warnings;
};

struct PolarResult {
  PencilFeasibility status = PencilFeasibility::Inaccurate;
  std::optional<PolarCertificate> certificate;
  std::vector<std::string> warnings;
};

struct PencilQMResult {
  PencilFeasibility status = PencilFeasibility::Inaccurate;
  std::optional<PencilQMCertificate> certificate;
  std::vector<std::string> warnings;
};

namespace detail {

/// Adds scale * (M∘X_block) to a row, with M symmetric.
inline void add_inner(SDPProblem& prob, int row, int block, const SymMatrix& M, double scale = 1.0) {
  for (Eigen::Index a = 0; a < M.dim(); ++a) {
    prob.add_block_coefficient(row, block, static_cast<int>(a), static_cast<int>(a), scale * M(a, a));
    for (Eigen::Index b = a + 1; b < M.dim(); ++b) {
      prob.add_block_coefficient(row, block, static_cast<int>(a), static_cast<int>(b), 2.0 * scale * M(a, b));
    }
  }
}

inline void add_objective_inner(SDPProblem& prob, int block, const SymMatrix& M) {
  for (Eigen::Index a = 0; a < M.dim(); ++a) {
    prob.add_objective_block(block, static_cast<int>(a), static_cast<int>(a), M(a, a));
    for (Eigen::Index b = a + 1; b < M.dim(); ++b) {
      prob.add_objective_block(block, static_cast<int>(a), static_cast<int>(b), 2.0 * M(a, b));
    }
  }
}

/// |v| <= R through two 1×1 slack blocks: R − v = s, R + v = s'.
inline void add_box(SDPProblem& prob, int var, double R) {
  for (double sign : {1.0, -1.0}) {
    const int blk = prob.add_block(1);
    const int row = prob.add_constraint(R);
    prob.add_block_coefficient(row, blk, 0, 0, 1.0);
    prob.add_free_coefficient(row, var, sign);
  }
}

/// Rows S_ab + t δ_ab − Σ v_j M_j,ab = rhs_ab for a <= b, where S is a
/// fresh k×k block. Returns the block index.
inline int add_shifted_matrix(SDPProblem& prob, const SymMatrix& rhs, const std::vector<SymMatrix>& mats,
                              const std::vector<int>& vars, int t) {
  const auto k = rhs.dim();
  const int S = prob.add_block(static_cast<int>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const int row = prob.add_constraint(rhs(a, b));
      prob.add_block_coefficient(row, S, static_cast<int>(a), static_cast<int>(b), 1.0);
      if (a == b) {
        prob.add_free_coefficient(row, t, 1.0);
      }
      for (std::size_t j = 0; j < mats.size(); ++j) {
        prob.add_free_coefficient(row, vars[j], -mats[j](a, b));
      }
    }
  }
  return S;
}

inline void check_point(const std::vector<double>& x, std::size_t n, const char* what) {
  require(x.size() == n, std::string(what) + " has the wrong number of coordinates");
  for (double v : x) {
    require(std::isfinite(v), std::string(what) + " coordinates must be finite");
  }
}

/// Out verdict from a functional ℓ(X) = U∘A'(X) with ℓ(x) < 0.
inline void separate(const MatrixPencil& P, const std::vector<double>& x, const SymMatrix& U_raw, Verdict& v) {
  const SymMatrix U(psd_project(U_raw.matrix()));
  const std::size_t n = static_cast<std::size_t>(P.nx());
  std::vector<double> ell(n + 1);
  ell[0] = U.inner(P.A());
  double gnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ell[i + 1] = U.inner(P.B(static_cast<int>(i)));
    gnorm += ell[i + 1] * ell[i + 1];
  }
  gnorm = std::sqrt(gnorm);
  double scale = gnorm;
  if (gnorm <= 1e-9 * std::abs(ell[0])) {
    scale = std::abs(ell[0]);
    v.notes.push_back("separator is a negative constant: the projected set is empty");
  }
  FPoly sep(P.xvars());
  double value = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    ell[i] /= scale;
    sep.add_term(i == 0 ? Monomial::one(n) : Monomial::variable(n, i - 1), ell[i]);
    value += ell[i] * (i == 0 ? 1.0 : x[i - 1]);
  }
  PolarCertificate c;
  c.U = U * (1.0 / scale);
  c.ell = ell;
  c.slack = ell[0] - c.U.inner(P.A());
  c.residual = polar_residual(P, c.U, c.ell);
  v.kind = VerdictKind::Out;
  v.margin = -value;
  v.separator = std::move(sep);
  v.certificate = std::move(c);
}

inline double max_row_residual(const SDPProblem& prob, const SDPSolution& sol) {
  double worst = 0.0;
  for (const auto& con : prob.constraints()) {
    double r = con.rhs;
    for (const auto& e : con.lhs.block_entries) {
      r -= e.value * sol.primal_blocks[static_cast<std::size_t>(e.block)](e.i, e.j);
    }
    for (const auto& e : con.lhs.free_entries) {
      r -= e.value * sol.free_values(e.var);
    }
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// NotApplicable (with a note) unless the pencil has an interior point.
inline std::optional<PencilFeasibility> require_strict(const MatrixPencil& P, const PencilOptions& opt,
                                                       std::vector<std::string>& notes);

}  // namespace detail

/// x ∈ S(A) iff eigmin(A(x,y)) >= −1e−9; the point lists x then y.
inline PencilPoint pencil_member(const MatrixPencil& P, const std::vector<double>& xy) {
  detail::check_point(xy, static_cast<std::size_t>(P.nx() + P.ny()), "point");
  const double e = eigmin(P.evaluate(xy)).value;
  return {e >= -1e-9, e};
}

/// max t subject to A(x,y) − tI ⪰ 0 and every coordinate in [−R, R].
inline StrictFeasibility strictly_feasible(const MatrixPencil& P, double R = 1e3, const SolverSettings& settings = {}) {
  require(R > 0 && std::isfinite(R), "box half-width must be positive");
  SDPProblem prob;
  const int nv = P.nx() + P.ny();
  const int first = prob.add_free(nv);
  const int t = prob.add_free();
  std::vector<SymMatrix> mats;
  std::vector<int> vars;
  for (int i = 0; i < P.nx(); ++i) {
    mats.push_back(P.B(i));
    vars.push_back(first + i);
  }
  for (int j = 0; j < P.ny(); ++j) {
    mats.push_back(P.C(j));
    vars.push_back(first + P.nx() + j);
  }
  detail::add_shifted_matrix(prob, P.A(), mats, vars, t);
  for (int v = 0; v < nv; ++v) {
    detail::add_box(prob, first + v, R);
  }
  prob.add_objective_free(t, -1.0);
  const SDPSolution sol = solve(prob, settings);
  StrictFeasibility out;
  out.warnings = sol.warnings;
  if (sol.status != SolveStatus::Optimal) {
    out.status = StrictFeasibility::Status::Inaccurate;
    out.warnings.push_back(std::string("interior-point search ended ") + to_string(sol.status));
    return out;
  }
  out.t = sol.free_values(t);
  if (out.t > 1e-6) {
    out.status = StrictFeasibility::Status::Witness;
    for (int v = 0; v < nv; ++v) {
      out.point.push_back(sol.free_values(first + v));
    }
  } else {
    out.status = StrictFeasibility::Status::None;
  }
  return out;
}

namespace detail {

inline std::optional<PencilFeasibility> require_strict(const MatrixPencil& P, const PencilOptions& opt,
                                                       std::vector<std::string>& notes) {
  const StrictFeasibility sf = strictly_feasible(P, opt.box, opt.solver);
  if (sf.status == StrictFeasibility::Status::Witness && sf.t > opt.strict_tol) {
    return std::nullopt;
  }
  if (sf.status == StrictFeasibility::Status::Inaccurate) {
    notes.insert(notes.end(), sf.warnings.begin(), sf.warnings.end());
    notes.push_back("could not decide strict feasibility of the pencil");
    return PencilFeasibility::Inaccurate;
  }
  notes.push_back("pencil is not strictly feasible");
  return PencilFeasibility::NotApplicable;
}

inline VerdictKind to_verdict(PencilFeasibility f) {
  return f == PencilFeasibility::NotApplicable ? VerdictKind::NotApplicable : VerdictKind::Inaccurate;
}

}  // namespace detail

/// x ∈ S = {x : ∃y A(x,y) ⪰ 0}: maximize t subject to A'(x) + Σ y_j C_j
/// − tI ⪰ 0 with |y_j| <= box. An Out verdict carries the separator
/// U∘A'(X) read off the dual.
inline Verdict projection_member(const MatrixPencil& P, const std::vector<double>& x, const PencilOptions& opt = {}) {
  detail::check_point(x, static_cast<std::size_t>(P.nx()), "point");
  SDPProblem prob;
  const int first = prob.add_free(P.ny());
  const int t = prob.add_free();
  std::vector<SymMatrix> mats;
  std::vector<int> vars;
  for (int j = 0; j < P.ny(); ++j) {
    mats.push_back(P.C(j));
    vars.push_back(first + j);
  }
  const int S = detail::add_shifted_matrix(prob, P.restricted(x), mats, vars, t);
  for (int j = 0; j < P.ny(); ++j) {
    detail::add_box(prob, first + j, opt.box);
  }
  prob.add_objective_free(t, -1.0);
  const SDPSolution sol = solve(prob, opt.solver);

  Verdict v;
  v.notes = sol.warnings;
  if (sol.status != SolveStatus::Optimal) {
    v.kind = VerdictKind::Inaccurate;
    v.notes.push_back(std::string("projection program ended ") + to_string(sol.status));
    return v;
  }
  v.optimum = sol.free_values(t);
  bool box_binds = false;
  for (int j = 0; j < P.ny(); ++j) {
    box_binds = box_binds || std::abs(sol.free_values(first + j)) >= 0.99 * opt.box;
  }
  if (box_binds) {
    v.notes.push_back("the box on the projected variables binds; the verdict may depend on it");
  }
  if (v.optimum >= -opt.tol) {
    v.kind = VerdictKind::In;
    if (v.optimum < opt.tol) {
      v.notes.push_back("point lies within the boundary tolerance band");
    }
    return v;
  }
  detail::separate(P, x, sol.dual_slacks[static_cast<std::size_t>(S)], v);
  if (!box_binds && std::get<PolarCertificate>(v.certificate).residual > opt.certificate_tol) {
    v.notes.push_back("separator residual " + to_string(std::get<PolarCertificate>(v.certificate).residual));
  }
  return v;
}

/// Decides whether ℓ = l_0 + Σ l_i X_i lies in the polar cone: U ⪰ 0,
/// U∘B_i = l_i, U∘C_j = 0, U∘A <= l_0. Among feasible U the one of least
/// trace is reported.
inline PolarResult polar_member(const MatrixPencil& P, const std::vector<double>& ell, const PencilOptions& opt = {}) {
  detail::check_point(ell, static_cast<std::size_t>(P.nx()) + 1, "affine function");
  PolarResult out;
  if (auto bad = detail::require_strict(P, opt, out.warnings)) {
    out.status = *bad;
    return out;
  }
  SDPProblem prob;
  const int U = prob.add_block(P.k());
  const int r = prob.add_block(1);
  const int row0 = prob.add_constraint(ell[0]);
  detail::add_inner(prob, row0, U, P.A());
  prob.add_block_coefficient(row0, r, 0, 0, 1.0);
  for (int i = 0; i < P.nx(); ++i) {
    detail::add_inner(prob, prob.add_constraint(ell[static_cast<std::size_t>(i) + 1]), U, P.B(i));
  }
  for (int j = 0; j < P.ny(); ++j) {
    detail::add_inner(prob, prob.add_constraint(0.0), U, P.C(j));
  }
  detail::add_objective_inner(prob, U, SymMatrix::identity(P.k()));
  SDPSolution sol = solve(prob, opt.solver);
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::Infeasible) {
    prob.set_sense(Sense::Feasibility);
    sol = solve(prob, opt.solver);
  }
  out.warnings.insert(out.warnings.end(), sol.warnings.begin(), sol.warnings.end());
  if (sol.status == SolveStatus::Infeasible) {
    out.status = PencilFeasibility::Infeasible;
    return out;
  }
  if (sol.status != SolveStatus::Optimal) {
    out.status = PencilFeasibility::Inaccurate;
    return out;
  }
  PolarCertificate c;
  c.U = SymMatrix(detail::psd_project(sol.primal_blocks[static_cast<std::size_t>(U)].matrix()));
  c.ell = ell;
  c.slack = ell[0] - c.U.inner(P.A());
  c.residual = polar_residual(P, c.U, c.ell);
  out.status = c.residual <= opt.certificate_tol ? PencilFeasibility::Feasible : PencilFeasibility::Inaccurate;
  if (out.status == PencilFeasibility::Inaccurate) {
    out.warnings.push_back("polar certificate residual " + to_string(c.residual));
  }
  out.certificate = std::move(c);
  return out;
}

/// Same for an affine polynomial in the pencil's X variables.
template <Coefficient F>
PolarResult polar_member(const MatrixPencil& P, const Polynomial<F>& ell, const PencilOptions& opt = {}) {
  require(ell.vars() == P.xvars(), "polynomial variables disagree with the pencil");
  require(ell.degree() <= 1, "polar membership needs an affine polynomial");
  const std::size_t n = static_cast<std::size_t>(P.nx());
  std::vector<double> coeffs(n + 1);
  coeffs[0] = to_double(ell.coefficient(Monomial::one(n)));
  for (std::size_t i = 0; i < n; ++i) {
    coeffs[i + 1] = to_double(ell.coefficient(Monomial::variable(n, i)));
  }
  return polar_member(P, coeffs, opt);
}

/// x ∈ cl(S) iff U∘A'(x) >= 0 for every U ⪰ 0 with U∘C_j = 0; decided by
/// minimizing U∘A'(x) over such U with trace 1.
inline Verdict closure_member(const MatrixPencil& P, const std::vector<double>& x, const PencilOptions& opt = {}) {
  detail::check_point(x, static_cast<std::size_t>(P.nx()), "point");
  Verdict v;
  if (auto bad = detail::require_strict(P, opt, v.notes)) {
    v.kind = detail::to_verdict(*bad);
    return v;
  }
  SDPProblem prob;
  const int U = prob.add_block(P.k());
  for (int j = 0; j < P.ny(); ++j) {
    detail::add_inner(prob, prob.add_constraint(0.0), U, P.C(j));
  }
  detail::add_inner(prob, prob.add_constraint(1.0), U, SymMatrix::identity(P.k()));
  detail::add_objective_inner(prob, U, P.restricted(x));
  const SDPSolution sol = solve(prob, opt.solver);
  v.notes.insert(v.notes.end(), sol.warnings.begin(), sol.warnings.end());
  if (sol.status == SolveStatus::Infeasible) {
    // Only constants are nonnegative on S, so cl(S) is the whole space.
    v.kind = VerdictKind::In;
    v.notes.push_back("no nonzero U annihilates every C_j");
    return v;
  }
  if (sol.status != SolveStatus::Optimal) {
    v.kind = VerdictKind::Inaccurate;
    v.notes.push_back(std::string("closure program ended ") + to_string(sol.status));
    return v;
  }
  v.optimum = sol.primal_objective;
  if (v.optimum >= -opt.tol) {
    v.kind = VerdictKind::In;
    if (v.optimum < opt.tol) {
      v.notes.push_back("point lies within the boundary tolerance band");
    }
    return v;
  }
  detail::separate(P, x, sol.primal_blocks[static_cast<std::size_t>(U)], v);
  return v;
}

/// Decides p ∈ QM(A)_d: p = A'(X)∘M(X) + σ with M = Σ q_j q_j^T over
/// (ℝ[X]_d)^k, C_j∘M ≡ 0, and σ a sum of squares over ℝ[X]_d. M is
/// parameterized by one PSD Gram of size k·N_d.
template <Coefficient F>
PencilQMResult pencil_qm_member(const MatrixPencil& P, int d, const Polynomial<F>& p, const PencilOptions& opt = {}) {
  require(d >= 0, "relaxation degree must be nonnegative");
  require(P.nx() >= 1, "pencil needs at least one X variable");
  require(p.vars() == P.xvars(), "polynomial variables disagree with the pencil");
  require(p.degree() <= 2 * d + 1, "polynomial degree exceeds 2d + 1");
  PencilQMResult out;
  if (auto bad = detail::require_strict(P, opt, out.warnings)) {
    out.status = *bad;
    return out;
  }
  const std::size_t n = static_cast<std::size_t>(P.nx());
  const std::size_t k = static_cast<std::size_t>(P.k());
  const auto basis = monomial_basis(n, d);
  const std::size_t N = basis.size();

  SDPProblem prob;
  const int G = prob.add_block(static_cast<int>(k * N));
  const int Gs = prob.add_block(static_cast<int>(N));
  std::map<Monomial, int> ident;
  std::vector<std::map<Monomial, int>> annihilate(static_cast<std::size_t>(P.ny()));
  auto row_of = [&prob](std::map<Monomial, int>& rows, const Monomial& m) {
    auto it = rows.find(m);
    if (it == rows.end()) {
      it = rows.emplace(m, prob.add_constraint(0.0)).first;
    }
    return it->second;
  };
  for (std::size_t i = 0; i < k * N; ++i) {
    for (std::size_t i2 = i; i2 < k * N; ++i2) {
      const std::size_t a = i / N, al = i % N, b = i2 / N, be = i2 % N;
      const double w = i == i2 ? 1.0 : 2.0;
      const Monomial m = basis[al] * basis[be];
      const int gi = static_cast<int>(i), gj = static_cast<int>(i2);
      const double a0 = P.A()(a, b);
      if (a0 != 0.0) {
        prob.add_block_coefficient(row_of(ident, m), G, gi, gj, w * a0);
      }
      for (std::size_t x = 0; x < n; ++x) {
        const double bx = P.B(static_cast<int>(x))(a, b);
        if (bx != 0.0) {
          prob.add_block_coefficient(row_of(ident, m * Monomial::variable(n, x)), G, gi, gj, w * bx);
        }
      }
      for (int j = 0; j < P.ny(); ++j) {
        const double cj = P.C(j)(a, b);
        if (cj != 0.0) {
          prob.add_block_coefficient(row_of(annihilate[static_cast<std::size_t>(j)], m), G, gi, gj, w * cj);
        }
      }
    }
  }
  for (std::size_t al = 0; al < N; ++al) {
    for (std::size_t be = al; be < N; ++be) {
      prob.add_block_coefficient(row_of(ident, basis[al] * basis[be]), Gs, static_cast<int>(al), static_cast<int>(be),
                                 al == be ? 1.0 : 2.0);
    }
  }
  const QPoly target = p.template cast<Rational>();
  for (const auto& [m, c] : target.terms()) {
    prob.set_rhs(row_of(ident, m), to_double(c));
  }
  prob.set_sense(Sense::Feasibility);
  const SDPSolution sol = solve(prob, opt.solver);
  out.warnings.insert(out.warnings.end(), sol.warnings.begin(), sol.warnings.end());
  if (sol.status == SolveStatus::Infeasible) {
    out.status = PencilFeasibility::Infeasible;
    return out;
  }
  if (sol.status != SolveStatus::Optimal) {
    out.status = PencilFeasibility::Inaccurate;
    return out;
  }
  PencilQMCertificate c;
  c.degree = d;
  c.vars = P.xvars();
  c.basis = basis;
  c.k = P.k();
  c.G = sol.primal_blocks[static_cast<std::size_t>(G)];
  c.G_sigma = sol.primal_blocks[static_cast<std::size_t>(Gs)];
  c.target = target;
  c.solver_residual = detail::max_row_residual(prob, sol);
  replay(P, c);
  out.status = c.replay_residual <= opt.certificate_tol ? PencilFeasibility::Feasible : PencilFeasibility::Inaccurate;
  if (out.status == PencilFeasibility::Inaccurate) {
    out.warnings.push_back("certificate failed exact replay (residual " + to_string(c.replay_residual) + ")");
  }
  out.certificate = std::move(c);
  return out;
}

}  // namespace specshadow

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "specshadow/error.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/relax/certificate.hpp"
#include "specshadow/relax/gram_system.hpp"
#include "specshadow/relax/sets.hpp"
#include "specshadow/sdp/solver.hpp"
#include "specshadow/verdict.hpp"

namespace specshadow {

enum class Feasibility { Feasible, Infeasible, Inaccurate };

inline const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible:
      return "feasible";
    case Feasibility::Infeasible:
      return "infeasible";
    case Feasibility::Inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

template <class Cert>
struct MembershipResult {
  Feasibility status = Feasibility::Inaccurate;
  std::optional<Cert> certificate;
  std::vector<std::string> warnings;
};

using QMResult = MembershipResult<QMCertificate>;
using SigmaResult = MembershipResult<SigmaCertificate>;

/// Support value h(u) = min{t : t − g ∈ cone}. Unbounded means no t
/// works (the relaxation is unbounded in that direction); Empty means t
/// can be taken arbitrarily negative (the relaxation is empty).
struct SupportResult {
  enum class Status { Finite, Unbounded, Empty, Inaccurate };
  Status status = Status::Inaccurate;
  double value = 0.0;
  std::optional<GramCertificate> certificate;
  std::vector<std::string> warnings;
};

inline const char* to_string(SupportResult::Status s) {
  switch (s) {
    case SupportResult::Status::Finite:
      return "finite";
    case SupportResult::Status::Unbounded:
      return "unbounded";
    case SupportResult::Status::Empty:
      return "empty";
    case SupportResult::Status::Inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

struct RelaxOptions {
  SolverSettings solver{};
  /// Boundary band for point membership on the normalized optimum.
  double tol = 1e-7;
  /// Largest acceptable exact-replay residual for a returned certificate.
  double replay_tol = 1e-6;
};

namespace detail {

inline QPoly linear_form(const std::vector<std::string>& vars, const std::vector<double>& u) {
  require(u.size() == vars.size(), "direction has the wrong number of coordinates");
  bool nonzero = false;
  QPoly g(vars);
  for (std::size_t k = 0; k < u.size(); ++k) {
    require(std::isfinite(u[k]), "direction must be finite");
    nonzero = nonzero || u[k] != 0.0;
    g.add_term(Monomial::variable(vars.size(), k), exact_rational(u[k]));
  }
  require(nonzero, "direction must be nonzero");
  return g;
}

/// Gram blocks for QM(p)_d: σ_0 for the constant 1, then one per p_i,
/// all over the same basis of degree d.
inline GramSystem qm_system(const SemialgebraicSet& S, int d) {
  require(d >= 0, "relaxation degree must be nonnegative");
  GramSystem gs(S.vars);
  const auto basis = monomial_basis(S.dim(), d);
  gs.add_gram(basis, QPoly::constant(S.vars, Rational(1)));
  for (const auto& p : S.inequalities) {
    gs.add_gram(basis, p);
  }
  return gs;
}

struct IdealColumn {
  std::size_t generator;
  Monomial monomial;
  int var;
};

/// Gram block for σ plus free multipliers for every m·g_j with
/// deg(m·g_j) <= D.
inline GramSystem sigma_system(const IdealSpec& I, int d, int D, std::vector<IdealColumn>& cols) {
  require(d >= 0, "relaxation degree must be nonnegative");
  GramSystem gs(I.vars);
  gs.add_gram(monomial_basis(I.dim(), d), QPoly::constant(I.vars, Rational(1)));
  for (std::size_t j = 0; j < I.generators.size(); ++j) {
    const QPoly& g = I.generators[j];
    const int room = D - g.degree();
    if (g.is_zero() || room < 0) {
      continue;
    }
    for (const auto& m : monomial_basis(I.dim(), room)) {
      QPoly mg(I.vars);
      mg.add_term(m, Rational(1));
      const int var = gs.add_free(mg * g);
      cols.push_back({j, m, var});
    }
  }
  return gs;
}

inline void attach_ideal_terms(GramCertificate& c, const IdealSpec& I, const std::vector<IdealColumn>& cols,
                               const Eigen::VectorXd& free_values) {
  c.generators = I.generators;
  c.ideal_multipliers.assign(I.generators.size(), QPoly(I.vars));
  for (const auto& col : cols) {
    const double v = free_values(col.var);
    if (v != 0.0) {
      c.ideal_multipliers[col.generator].add_term(col.monomial, dyadic_round(v, 52));
    }
  }
}

inline Feasibility classify_feasibility(const SDPSolution& sol) {
  switch (sol.status) {
    case SolveStatus::Optimal:
      return Feasibility::Feasible;
    case SolveStatus::Infeasible:
      return Feasibility::Infeasible;
    default:
      return Feasibility::Inaccurate;
  }
}

template <class Cert>
void check_replay(MembershipResult<Cert>& r, const RelaxOptions& opt) {
  if (r.status == Feasibility::Feasible && r.certificate &&
      !(r.certificate->replay_residual <= opt.replay_tol)) {
    r.status = Feasibility::Inaccurate;
    r.warnings.push_back("certificate failed exact replay (residual " +
                         to_string(r.certificate->replay_residual) + ")");
  }
}

/// min t subject to t − g = Σ blocks (+ ideal terms), on a prepared system.
/// The system must not have had a target added yet.
inline SupportResult support_on(GramSystem& gs, const QPoly& g, int degree, const RelaxOptions& opt,
                                const IdealSpec* ideal, const std::vector<IdealColumn>* cols) {
  SupportResult out;
  const int t = gs.add_free(QPoly::constant(gs.vars(), Rational(-1)));
  gs.add_target(-g);
  gs.problem().add_objective_free(t, 1.0);
  gs.problem().set_sense(Sense::Minimize);
  const SDPSolution sol = solve(gs.problem(), opt.solver);
  out.warnings = sol.warnings;
  switch (sol.status) {
    case SolveStatus::Optimal: {
      out.status = SupportResult::Status::Finite;
      out.value = sol.free_values(t);
      GramCertificate c = gs.certificate(sol, degree);
      c.target = QPoly::constant(gs.vars(), exact_rational(out.value)) - g;
      if (ideal != nullptr) {
        attach_ideal_terms(c, *ideal, *cols, sol.free_values);
      }
      GramSystem::finish(c);
      if (!(c.replay_residual <= opt.replay_tol)) {
        out.warnings.push_back("support certificate replay residual " + to_string(c.replay_residual));
      }
      out.certificate = std::move(c);
      break;
    }
    case SolveStatus::Infeasible:
      out.status = SupportResult::Status::Unbounded;
      break;
    case SolveStatus::Unbounded:
      out.status = SupportResult::Status::Empty;
      break;
    case SolveStatus::Inaccurate:
      out.status = SupportResult::Status::Inaccurate;
      break;
  }
  return out;
}

/// min ℓ(x) over linear ℓ = Σ blocks (+ ideal terms) with Σ trace = 1,
/// and ℓ(x) >= −1 so that the program stays bounded when the ideal terms
/// leave ℓ unconstrained.
inline Verdict point_member_on(GramSystem& gs, const std::vector<double>& x, int degree, const RelaxOptions& opt,
                               const IdealSpec* ideal, const std::vector<IdealColumn>* cols) {
  const auto& vars = gs.vars();
  const std::size_t n = vars.size();
  require(x.size() == n, "point has the wrong number of coordinates");
  for (double v : x) {
    require(std::isfinite(v), "point coordinates must be finite");
  }
  gs.add_trace_normalization(1.0);
  std::vector<int> ell(n + 1);
  ell[0] = gs.add_free(QPoly::constant(vars, Rational(-1)));
  for (std::size_t k = 0; k < n; ++k) {
    ell[k + 1] = gs.add_free(-QPoly::variable(vars, k));
  }
  SDPProblem& prob = gs.problem();
  const int floor_block = prob.add_block(1);
  const int floor_row = prob.add_constraint(-1.0);
  prob.add_block_coefficient(floor_row, floor_block, 0, 0, -1.0);
  prob.add_free_coefficient(floor_row, ell[0], 1.0);
  prob.add_objective_free(ell[0], 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    prob.add_free_coefficient(floor_row, ell[k + 1], x[k]);
    prob.add_objective_free(ell[k + 1], x[k]);
  }
  prob.set_sense(Sense::Minimize);

  Verdict v;
  const SDPSolution sol = solve(prob, opt.solver);
  v.notes = sol.warnings;
  if (sol.status != SolveStatus::Optimal) {
    v.kind = VerdictKind::Inaccurate;
    v.notes.push_back(std::string("membership program ended ") + to_string(sol.status));
    return v;
  }
  v.optimum = sol.primal_objective;
  if (v.optimum >= opt.tol) {
    v.kind = VerdictKind::In;
    return v;
  }
  if (v.optimum >= -opt.tol) {
    v.kind = VerdictKind::In;
    v.low_confidence = true;
    v.notes.push_back("point lies within the boundary tolerance band");
    return v;
  }

  // Out: rescale ℓ to a unit gradient.
  double l0 = sol.free_values(ell[0]);
  double gnorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    gnorm += std::pow(sol.free_values(ell[k + 1]), 2);
  }
  gnorm = std::sqrt(gnorm);
  double scale = gnorm;
  if (gnorm <= 1e-9 * std::abs(l0)) {
    scale = std::abs(l0);
    v.notes.push_back("separator is a negative constant: the relaxation is empty");
  }
  std::vector<double> coeffs(n + 1);
  coeffs[0] = l0 / scale;
  double value = coeffs[0];
  for (std::size_t k = 0; k < n; ++k) {
    coeffs[k + 1] = sol.free_values(ell[k + 1]) / scale;
    value += coeffs[k + 1] * x[k];
  }
  FPoly sep(vars);
  QPoly sep_exact(vars);
  for (std::size_t k = 0; k <= n; ++k) {
    const Monomial m = k == 0 ? Monomial::one(n) : Monomial::variable(n, k - 1);
    sep.add_term(m, coeffs[k]);
    sep_exact.add_term(m, exact_rational(coeffs[k]));
  }
  GramCertificate c = gs.certificate(sol, degree);
  for (auto& b : c.blocks) {
    b.gram = b.gram * (1.0 / scale);
  }
  c.target = sep_exact;
  if (ideal != nullptr) {
    Eigen::VectorXd scaled = sol.free_values / scale;
    attach_ideal_terms(c, *ideal, *cols, scaled);
  }
  GramSystem::finish(c);
  if (!(c.replay_residual <= opt.replay_tol)) {
    v.kind = VerdictKind::Inaccurate;
    v.notes.push_back("separator certificate failed exact replay (residual " + to_string(c.replay_residual) + ")");
    return v;
  }
  v.kind = VerdictKind::Out;
  v.margin = -value;
  v.separator = std::move(sep);
  v.certificate = std::move(c);
  return v;
}

}  // namespace detail

/// Decides f ∈ QM(p)_d: f = σ_0 + Σ σ_i p_i with every σ_i a Gram form
/// over the monomials of degree <= d.
inline QMResult qm_member(const SemialgebraicSet& S, int d, const QPoly& f, const RelaxOptions& opt = {}) {
  require(f.vars() == S.vars, "polynomial variables disagree with the set");
  require(f.degree() <= 2 * d + S.nu(), "polynomial degree exceeds 2d + max inequality degree");
  GramSystem gs = detail::qm_system(S, d);
  gs.add_target(f);
  gs.problem().set_sense(Sense::Feasibility);
  const SDPSolution sol = solve(gs.problem(), opt.solver);
  QMResult r;
  r.status = detail::classify_feasibility(sol);
  r.warnings = sol.warnings;
  if (r.status == Feasibility::Feasible) {
    GramCertificate c = gs.certificate(sol, d);
    c.target = f;
    GramSystem::finish(c);
    r.certificate = std::move(c);
  }
  detail::check_replay(r, opt);
  return r;
}

/// Support of L(p)_d in direction u: min{t : t − ⟨u,X⟩ ∈ QM(p)_d}.
inline SupportResult lasserre_support(const SemialgebraicSet& S, int d, const std::vector<double>& u,
                                      const RelaxOptions& opt = {}) {
  const QPoly g = detail::linear_form(S.vars, u);
  require(1 <= 2 * d + S.nu(), "degree too small for a linear target");
  GramSystem gs = detail::qm_system(S, d);
  return detail::support_on(gs, g, d, opt, nullptr, nullptr);
}

/// x ∈ L(p)_d iff ℓ(x) >= 0 for every linear ℓ in QM(p)_d.
inline Verdict lasserre_point_member(const SemialgebraicSet& S, int d, const std::vector<double>& x,
                                     const RelaxOptions& opt = {}) {
  GramSystem gs = detail::qm_system(S, d);
  return detail::point_member_on(gs, x, d, opt, nullptr, nullptr);
}

/// Decides f ∈ Σ(d,I): f − σ lies in span{m·g_j : deg(m·g_j) <= max(2d, deg f)}.
inline SigmaResult sigma_member(const IdealSpec& I, int d, const QPoly& f, const RelaxOptions& opt = {}) {
  require(f.vars() == I.vars, "polynomial variables disagree with the ideal");
  require(f.degree() <= 2 * d, "polynomial degree exceeds 2d");
  std::vector<detail::IdealColumn> cols;
  GramSystem gs = detail::sigma_system(I, d, std::max(2 * d, f.degree()), cols);
  gs.add_target(f);
  gs.problem().set_sense(Sense::Feasibility);
  const SDPSolution sol = solve(gs.problem(), opt.solver);
  SigmaResult r;
  r.status = detail::classify_feasibility(sol);
  r.warnings = sol.warnings;
  if (r.status == Feasibility::Feasible) {
    GramCertificate c = gs.certificate(sol, d);
    c.target = f;
    detail::attach_ideal_terms(c, I, cols, sol.free_values);
    GramSystem::finish(c);
    r.certificate = std::move(c);
  }
  detail::check_replay(r, opt);
  return r;
}

/// Support of TH(I)_d in direction u: min{t : t − ⟨u,X⟩ ∈ Σ(d,I)}.
inline SupportResult theta_support(const IdealSpec& I, int d, const std::vector<double>& u,
                                   const RelaxOptions& opt = {}) {
  require(d >= 1, "theta bodies start at degree 1");
  const QPoly g = detail::linear_form(I.vars, u);
  std::vector<detail::IdealColumn> cols;
  GramSystem gs = detail::sigma_system(I, d, 2 * d, cols);
  return detail::support_on(gs, g, d, opt, &I, &cols);
}

inline Verdict theta_point_member(const IdealSpec& I, int d, const std::vector<double>& x,
                                  const RelaxOptions& opt = {}) {
  require(d >= 1, "theta bodies start at degree 1");
  std::vector<detail::IdealColumn> cols;
  GramSystem gs = detail::sigma_system(I, d, 2 * d, cols);
  return detail::point_member_on(gs, x, d, opt, &I, &cols);
}

/// Support in direction u of the degree-d hull of f(S):
/// min{t : t − Σ u_i f_i ∈ QM(p)_d}.
inline SupportResult pushforward_support(const SemialgebraicSet& S, int d, const std::vector<QPoly>& f,
                                         const std::vector<double>& u, const RelaxOptions& opt = {}) {
  require(!f.empty(), "pushforward needs at least one component");
  require(u.size() == f.size(), "direction length must match the number of components");
  QPoly g(S.vars);
  bool nonzero = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(f[i].vars() == S.vars, "component variables disagree with the set");
    require(std::isfinite(u[i]), "direction must be finite");
    nonzero = nonzero || u[i] != 0.0;
    g += f[i].scaled(exact_rational(u[i]));
  }
  require(nonzero, "direction must be nonzero");
  require(g.degree() <= 2 * d + S.nu(), "pushed-forward degree exceeds 2d + max inequality degree");
  GramSystem gs = detail::qm_system(S, d);
  return detail::support_on(gs, g, d, opt, nullptr, nullptr);
}

}  // namespace specshadow

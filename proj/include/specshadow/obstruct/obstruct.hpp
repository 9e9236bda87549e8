#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specshadow/error.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/poly/scalar.hpp"
#include "specshadow/relax/sets.hpp"

namespace specshadow {

enum class ObstructionVerdict { Obstructed, NotObstructed, NotApplicable, WitnessInvalid };

inline const char* to_string(ObstructionVerdict v) {
  switch (v) {
    case ObstructionVerdict::Obstructed:
      return "obstructed";
    case ObstructionVerdict::NotObstructed:
      return "not-obstructed";
    case ObstructionVerdict::NotApplicable:
      return "not-applicable";
    case ObstructionVerdict::WitnessInvalid:
      return "witness-invalid";
  }
  return "unknown";
}

enum class HypothesisStatus { Verified, Failed, Asserted };

inline const char* to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Verified:
      return "verified";
    case HypothesisStatus::Failed:
      return "failed";
    case HypothesisStatus::Asserted:
      return "asserted";
  }
  return "unknown";
}

struct Hypothesis {
  std::string statement;
  HypothesisStatus status;
};

/// One polynomial evaluated at the base point: value, gradient and (when
/// a direction is involved) the gradient's inner product with it.
template <Coefficient F>
struct GradientRow {
  std::size_t index = 0;
  std::string polynomial;
  F value{};
  bool active = false;
  std::vector<F> gradient;
  std::optional<F> inner;
};

template <Coefficient F>
struct ObstructionReport {
  ObstructionVerdict verdict = ObstructionVerdict::NotApplicable;
  std::vector<std::size_t> active;
  std::vector<GradientRow<F>> gradients;
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> notes;
  /// Set when the tangent space was computed from generators that the
  /// caller did not assert to be real radical.
  bool generator_caveat = false;
};

/// Exact mode (Rational) compares with zero exactly; float mode (double)
/// uses `tol` for activity, orthogonality and the sampled feasibility.
struct ObstructionOptions {
  double box = 10.0;
  int samples = 1001;
  double tol = 1e-9;
  /// Minimum run of consecutive feasible samples that counts as a
  /// segment of S ∩ L.
  int min_run = 3;
};

namespace detail {

template <Coefficient F>
bool near_zero(const F& v, double tol) {
  if constexpr (std::is_same_v<F, Rational>) {
    return sgn(v) == 0;
  } else {
    return std::abs(v) <= tol;
  }
}

template <Coefficient F>
bool at_least_zero(const F& v, double tol) {
  if constexpr (std::is_same_v<F, Rational>) {
    return sgn(v) >= 0;
  } else {
    return v >= -tol;
  }
}

template <Coefficient F>
std::vector<Polynomial<F>> in_mode(const std::vector<QPoly>& ps) {
  std::vector<Polynomial<F>> out;
  for (const auto& p : ps) {
    out.push_back(p.template cast<F>());
  }
  return out;
}

template <Coefficient F>
void check_coordinates(const std::vector<F>& x, std::size_t n, const char* what) {
  require(x.size() == n, std::string(what) + " has the wrong number of coordinates");
  if constexpr (std::is_same_v<F, double>) {
    for (double v : x) {
      require(std::isfinite(v), std::string(what) + " coordinates must be finite");
    }
  }
}

template <Coefficient F>
GradientRow<F> gradient_row(std::size_t i, const Polynomial<F>& p, const std::vector<F>& a, double tol,
                            const std::vector<F>* dir) {
  GradientRow<F> row;
  row.index = i;
  row.polynomial = p.to_string();
  row.value = p.evaluate(a);
  row.active = near_zero(row.value, tol);
  for (const auto& g : p.gradient()) {
    row.gradient.push_back(g.evaluate(a));
  }
  if (dir != nullptr) {
    F s{};
    for (std::size_t k = 0; k < a.size(); ++k) {
      s += row.gradient[k] * (*dir)[k];
    }
    row.inner = s;
  }
  return row;
}

template <Coefficient F>
std::vector<Polynomial<F>> member_polynomials(const SemialgebraicSet& S, const std::vector<F>& a, double tol,
                                              const char* what) {
  check_coordinates(a, S.dim(), what);
  auto ps = in_mode<F>(S.inequalities);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    require(at_least_zero(ps[i].evaluate(a), tol),
            std::string(what) + " is not in S: inequality " + std::to_string(i) + " fails");
  }
  return ps;
}

/// Longest run of consecutive samples a + t·u (t evenly spaced in
/// [−box, box], u = dir / max|dir_k|) at which every p_i is nonnegative.
template <Coefficient F>
int longest_feasible_run(const std::vector<Polynomial<F>>& ps, const std::vector<F>& a, const std::vector<F>& u,
                         const ObstructionOptions& opt) {
  const int N = std::max(opt.samples, 2);
  F R;
  if constexpr (std::is_same_v<F, Rational>) {
    R = exact_rational(opt.box);
  } else {
    R = opt.box;
  }
  int best = 0, run = 0;
  std::vector<F> x(a.size());
  for (int s = 0; s < N; ++s) {
    const F t = -R + F(2) * R * F(s) / F(N - 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
      x[k] = a[k] + t * u[k];
    }
    bool ok = true;
    for (const auto& p : ps) {
      if (!at_least_zero(p.evaluate(x), opt.tol)) {
        ok = false;
        break;
      }
    }
    run = ok ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace detail

/// Line criterion: if S ∩ L has nonempty interior relative to the line L
/// through a, a lies on the relative boundary of conv(S) ∩ L, and every
/// constraint active at a has gradient orthogonal to L, then no Lasserre
/// relaxation of S is exact. The relative-boundary condition is taken
/// from the caller.
template <Coefficient F>
ObstructionReport<F> line_obstruction(const SemialgebraicSet& S, const std::vector<F>& a, const std::vector<F>& dir,
                                      const ObstructionOptions& opt = {}) {
  const auto ps = detail::member_polynomials(S, a, opt.tol, "base point");
  detail::check_coordinates(dir, S.dim(), "direction");
  F scale{};
  for (const auto& v : dir) {
    scale = std::max(scale, F(abs_value(v)));
  }
  require(!is_zero(scale), "direction must be nonzero");
  require(opt.box > 0 && opt.samples >= 2, "sampling box and count must be positive");
  std::vector<F> u;
  for (const auto& v : dir) {
    u.push_back(v / scale);
  }

  ObstructionReport<F> rep;
  bool orthogonal = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto row = detail::gradient_row(i, ps[i], a, opt.tol, &u);
    if (row.active) {
      rep.active.push_back(i);
      orthogonal = orthogonal && detail::near_zero(*row.inner, opt.tol);
    }
    rep.gradients.push_back(std::move(row));
  }
  const int run = detail::longest_feasible_run(ps, a, u, opt);
  const bool interior = run >= opt.min_run;

  rep.hypotheses.push_back({"every active gradient is orthogonal to the line",
                            orthogonal ? HypothesisStatus::Verified : HypothesisStatus::Failed});
  rep.hypotheses.push_back({"S meets the line in a set with nonempty relative interior (sampled, longest run " +
                                std::to_string(run) + " of " + std::to_string(opt.samples) + ")",
                            interior ? HypothesisStatus::Verified : HypothesisStatus::Failed});
  rep.hypotheses.push_back({"the base point lies on the relative boundary of conv(S) within the line",
                            HypothesisStatus::Asserted});
  if (!orthogonal) {
    rep.verdict = ObstructionVerdict::NotObstructed;
  } else if (!interior) {
    rep.verdict = ObstructionVerdict::NotApplicable;
  } else {
    rep.verdict = ObstructionVerdict::Obstructed;
  }
  return rep;
}

/// If every constraint active at the boundary point a has a vanishing
/// gradient there, every line through a satisfies the gradient condition.
template <Coefficient F>
ObstructionReport<F> singular_point_obstruction(const SemialgebraicSet& S, const std::vector<F>& a,
                                                const ObstructionOptions& opt = {}) {
  const auto ps = detail::member_polynomials(S, a, opt.tol, "point");
  ObstructionReport<F> rep;
  bool singular = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto row = detail::gradient_row<F>(i, ps[i], a, opt.tol, nullptr);
    if (row.active) {
      rep.active.push_back(i);
      for (const auto& g : row.gradient) {
        singular = singular && detail::near_zero(g, opt.tol);
      }
      if (!singular) {
        rep.notes.push_back("gradient of inequality " + std::to_string(i) + " does not vanish");
      }
    }
    rep.gradients.push_back(std::move(row));
  }
  rep.hypotheses.push_back({"the point lies on the boundary of S", HypothesisStatus::Asserted});
  if (rep.active.empty()) {
    rep.verdict = ObstructionVerdict::NotApplicable;
    rep.notes.push_back("no constraint is active at the point");
    rep.hypotheses.push_back({"every active constraint is singular", HypothesisStatus::Failed});
    return rep;
  }
  rep.hypotheses.push_back({"every active constraint is singular",
                            singular ? HypothesisStatus::Verified : HypothesisStatus::Failed});
  rep.verdict = singular ? ObstructionVerdict::Obstructed : ObstructionVerdict::NotObstructed;
  return rep;
}

/// Line test along b − a, where a is a relative-interior point of a face F
/// of conv(S) and b one of a face F₁ with F ⊂ F₁.
template <Coefficient F>
ObstructionReport<F> nonexposed_face_check(const SemialgebraicSet& S, const std::vector<F>& a,
                                           const std::vector<F>& b, const ObstructionOptions& opt = {}) {
  detail::check_coordinates(a, S.dim(), "face point");
  detail::check_coordinates(b, S.dim(), "larger face point");
  require(a != b, "the two face points must differ");
  detail::member_polynomials(S, b, opt.tol, "larger face point");
  std::vector<F> dir;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dir.push_back(b[k] - a[k]);
  }
  auto rep = line_obstruction(S, a, dir, opt);
  rep.hypotheses.push_back({"the first point is in the relative interior of a face F", HypothesisStatus::Asserted});
  rep.hypotheses.push_back(
      {"the second point is in the relative interior of a face containing F", HypothesisStatus::Asserted});
  return rep;
}

/// Checks a witness q for p being convex-singular: q − p must lie in the
/// tangent space at p, i.e. be orthogonal to every generator gradient.
/// The tangent space is computed from the supplied generators; unless
/// they are asserted real radical the report carries a caveat.
template <Coefficient F>
ObstructionReport<F> convex_singular_check(const IdealSpec& I, const std::vector<F>& p, const std::vector<F>& q,
                                           bool real_radical = false, const ObstructionOptions& opt = {}) {
  detail::check_coordinates(p, I.dim(), "point");
  detail::check_coordinates(q, I.dim(), "witness");
  const auto gs = detail::in_mode<F>(I.generators);
  for (std::size_t j = 0; j < gs.size(); ++j) {
    require(detail::near_zero(gs[j].evaluate(p), opt.tol),
            "point is not on the variety: generator " + std::to_string(j) + " does not vanish");
  }
  std::vector<F> dir;
  for (std::size_t k = 0; k < p.size(); ++k) {
    dir.push_back(q[k] - p[k]);
  }
  ObstructionReport<F> rep;
  bool tangent = true;
  for (std::size_t j = 0; j < gs.size(); ++j) {
    auto row = detail::gradient_row(j, gs[j], p, opt.tol, &dir);
    rep.active.push_back(j);
    tangent = tangent && detail::near_zero(*row.inner, opt.tol);
    rep.gradients.push_back(std::move(row));
  }
  rep.hypotheses.push_back({"the witness lies in the tangent space at the point",
                            tangent ? HypothesisStatus::Verified : HypothesisStatus::Failed});
  rep.hypotheses.push_back({"the witness is in the relative interior of the convex hull of the real variety",
                            HypothesisStatus::Asserted});
  rep.hypotheses.push_back({"the point lies on the boundary of the convex hull", HypothesisStatus::Asserted});
  rep.hypotheses.push_back({"the generators span a real radical ideal",
                            real_radical ? HypothesisStatus::Asserted : HypothesisStatus::Failed});
  rep.generator_caveat = !real_radical;
  if (!real_radical) {
    rep.notes.push_back("tangent space computed from the supplied generators, which were not asserted real radical");
  }
  rep.verdict = tangent ? ObstructionVerdict::Obstructed : ObstructionVerdict::WitnessInvalid;
  return rep;
}

template <Coefficient F>
json report_to_json(const ObstructionReport<F>& rep) {
  json doc;
  doc["verdict"] = to_string(rep.verdict);
  doc["active"] = rep.active;
  doc["gradients"] = json::array();
  for (const auto& row : rep.gradients) {
    json r;
    r["index"] = row.index;
    r["polynomial"] = row.polynomial;
    r["value"] = to_string(row.value);
    r["active"] = row.active;
    json g = json::array();
    for (const auto& v : row.gradient) {
      g.push_back(to_string(v));
    }
    r["gradient"] = std::move(g);
    if (row.inner) {
      r["inner_product"] = to_string(*row.inner);
    }
    doc["gradients"].push_back(std::move(r));
  }
  doc["hypotheses"] = json::array();
  for (const auto& h : rep.hypotheses) {
    doc["hypotheses"].push_back({{"statement", h.statement}, {"status", to_string(h.status)}});
  }
  doc["notes"] = rep.notes;
  doc["generator_caveat"] = rep.generator_caveat;
  return doc;
}

}  // namespace specshadow

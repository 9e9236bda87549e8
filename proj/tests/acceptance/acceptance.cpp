// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sdp_oracles.hpp"
#include "specshadow/specshadow.hpp"

using namespace specshadow;

namespace {

const std::string kData = SPECSHADOW_DATA_DIR;
constexpr double kInf = std::numeric_limits<double>::infinity();

json load(const std::string& name) {
  std::ifstream in(kData + "/" + name);
  return json::parse(in);
}

/// Collects failed sub-checks for one criterion.
class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}

  void check(bool ok, const std::string& what) {
    ++count_;
    if (!ok) {
      failures_.push_back(what);
    }
  }

  bool report() const {
    std::cout << "criterion " << id_ << ": " << (failures_.empty() ? "PASS" : "FAIL") << " (" << count_ - failures_.size()
              << "/" << count_ << " checks)\n";
    for (const auto& f : failures_) {
      std::cout << "    failed: " << f << '\n';
    }
    return failures_.empty();
  }

 private:
  int id_;
  int count_ = 0;
  std::vector<std::string> failures_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double support_value(const SupportResult& r) {
  switch (r.status) {
    case SupportResult::Status::Finite:
      return r.value;
    case SupportResult::Status::Unbounded:
      return kInf;
    case SupportResult::Status::Empty:
      return -kInf;
    case SupportResult::Status::Inaccurate:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Polynomials built term by term, without the expression parser.
struct Ring {
  std::vector<std::string> vars;

  QPoly c(const Rational& v) const { return QPoly::constant(vars, v); }
  QPoly x(std::size_t k) const { return QPoly::variable(vars, k); }
};

bool tangent_identity(const Rational& a) {
  const Ring R{{"X", "Y"}};
  const QPoly X = R.x(0), Y = R.x(1);
  const QPoly Xa = X - R.c(a);
  const QPoly lhs = Xa * Xa * R.c(2 * a - 1) + (Y - X * X * X) + Xa * Xa * (X + R.c(1));
  const QPoly rhs = Y - X * R.c(3 * a * a) + R.c(2 * a * a * a);
  return (lhs - rhs).is_zero();
}

// a = 3/4: 2a − 1 = 1/2 = t² for the adjoined symbol t.
bool tangent_identity_with_root() {
  const Ring R{{"X", "Y", "t"}};
  const QPoly X = R.x(0), Y = R.x(1), t = R.x(2);
  const Rational a(3, 4);
  const QPoly Xa = X - R.c(a);
  const QPoly tX = t * Xa;
  const QPoly lhs = tX * tX + (Y - X * X * X) + Xa * Xa * (X + R.c(1));
  const QPoly rhs = Y - X * R.c(3 * a * a) + R.c(2 * a * a * a);
  const RuleSet<Rational> root({{2, 2, R.c(Rational(1, 2))}});
  return reduce_mod_rules(lhs - rhs, root).is_zero();
}

QPoly two_disk_polynomial(const Ring& R) {
  const QPoly X = R.x(0), Y = R.x(1);
  const QPoly X2 = X * X, Y2 = Y * Y;
  return -(X2 * X2) - Y2 * Y2 - X2 * Y2 * R.c(2) + X2 * R.c(4);
}

bool two_disk_family() {
  const Ring R{{"X", "Y", "c", "s"}};
  const QPoly X = R.x(0), Y = R.x(1), c = R.x(2), s = R.x(3);
  const QPoly ell = R.c(1) - c - c * X - s * Y;
  const QPoly q = X * X + Y * Y - R.c(2) + c * R.c(2);
  const QPoly lhs = (R.c(8) - c * R.c(8)) * ell;
  const QPoly rhs = two_disk_polynomial(R) + q * q + (R.c(1) - c) * R.c(4) * (Y - s) * (Y - s) -
                    c * R.c(4) * (X - c + R.c(1)) * (X - c + R.c(1));
  const RuleSet<Rational> circle({{3, 2, R.c(1) - c * c}});
  return reduce_mod_rules(lhs - rhs, circle).is_zero();
}

bool two_disk_theta_pi() {
  const Ring R{{"X", "Y"}};
  const QPoly X = R.x(0), Y = R.x(1);
  const QPoly q = X * X + Y * Y - R.c(4);
  const QPoly rhs = two_disk_polynomial(R) + q * q + Y * Y * R.c(8) + (X + R.c(2)) * (X + R.c(2)) * R.c(4);
  return (R.c(16) * (R.c(2) + X) - rhs).is_zero();
}

bool criterion1() {
  Criterion c(1);
  c.check(tangent_identity(Rational(1, 2)), "tangent identity a=1/2");
  c.check(tangent_identity(Rational(1)), "tangent identity a=1");
  c.check(tangent_identity_with_root(), "tangent identity a=3/4 with t^2 = 1/2");
  c.check(two_disk_family(), "supporting-line family modulo s^2 -> 1-c^2");
  c.check(two_disk_theta_pi(), "theta = pi specialization");
  return c.report();
}

bool criterion2() {
  Criterion c(2);
  const auto S = set_from_json(load("counterexample.json"));
  const auto in = lasserre_point_member(S, 1, {1.0 / 3.0, 0.0});
  c.check(in.kind == VerdictKind::In, std::string("(1/3,0) verdict ") + to_string(in.kind));
  const auto out = lasserre_point_member(S, 1, {0.4, 0.0});
  c.check(out.kind == VerdictKind::Out && out.margin >= 0.01,
          std::string("(0.4,0) verdict ") + to_string(out.kind) + " margin " + num(out.margin));
  if (out.separator) {
    const auto again = qm_member(S, 1, out.separator->cast<Rational>());
    c.check(again.status == Feasibility::Feasible, std::string("separator re-verification ") + to_string(again.status));
  } else {
    c.check(false, "no separator returned");
  }
  const double h1 = support_value(lasserre_support(S, 1, {-1.0, 0.0}));
  c.check(std::abs(h1 - 1.0) <= 1e-5, "support (-1,0) = " + num(h1));
  const double h2 = support_value(lasserre_support(S, 1, {0.0, -1.0}));
  c.check(std::abs(h2) <= 1e-6, "support (0,-1) = " + num(h2));
  return c.report();
}

bool criterion3() {
  Criterion c(3);
  const auto S = set_from_json(load("twodisks.json"));
  const double r = std::sqrt(2.0) / 2.0;
  const std::vector<std::pair<std::vector<double>, double>> cases{
      {{1.0, 0.0}, 2.0}, {{0.0, 1.0}, 1.0}, {{r, r}, 1.0 + r}};
  for (const auto& [u, expect] : cases) {
    const double h = support_value(lasserre_support(S, 2, u));
    c.check(std::abs(h - expect) <= 1e-4, "direction (" + num(u[0]) + "," + num(u[1]) + ") support " + num(h));
  }
  return c.report();
}

bool criterion4() {
  Criterion c(4);
  const auto cusp = set_from_json(load("cusp.json"));
  const auto nonexposed = set_from_json(load("nonexposed.json"));
  const auto square = set_from_json(load("square.json"));
  const std::vector<Rational> origin{0, 0};
  c.check(singular_point_obstruction(cusp, origin).verdict == ObstructionVerdict::Obstructed, "cusp singular point");
  c.check(nonexposed_face_check(nonexposed, origin, {Rational(-1, 2), Rational(0)}).verdict ==
              ObstructionVerdict::Obstructed,
          "non-exposed face");
  const std::vector<Rational> vertex{1, 1};
  c.check(singular_point_obstruction(square, vertex).verdict == ObstructionVerdict::NotObstructed,
          "square vertex, singular-point check");
  c.check(nonexposed_face_check(square, vertex, {Rational(1), Rational(0)}).verdict ==
              ObstructionVerdict::NotObstructed,
          "square vertex, face check");
  // conv(S) lies in X >= 0 and contains the origin, so its support in
  // direction (−1,0) is 0.
  for (int d : {1, 2}) {
    const double h = support_value(lasserre_support(cusp, d, {-1.0, 0.0}));
    c.check(h > 1e-6, "cusp support (-1,0) at d=" + std::to_string(d) + " is " + num(h));
  }
  return c.report();
}

bool criterion5() {
  Criterion c(5);
  const auto circle = ideal_from_json(load("circle.json"));
  for (const std::vector<double>& u :
       std::vector<std::vector<double>>{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
    const double h = support_value(theta_support(circle, 1, u));
    c.check(std::abs(h - 1.0) <= 1e-5, "circle support (" + num(u[0]) + "," + num(u[1]) + ") " + num(h));
  }
  const auto v = theta_point_member(circle, 1, {1.05, 0.0});
  c.check(v.kind == VerdictKind::Out && v.margin >= 0.04,
          std::string("circle (1.05,0) ") + to_string(v.kind) + " margin " + num(v.margin));
  const auto sc = ideal_from_json(load("sphere_cylinder.json"));
  const double h = support_value(theta_support(sc, 1, {1.0, 0.0, 0.0}));
  c.check(std::abs(h - 2.0) <= 1e-4, "sphere-cylinder support (1,0,0) " + num(h));
  const auto zitrus = ideal_from_json(load("zitrus.json"));
  const std::vector<Rational> zero{0, 0, 0};
  c.check(convex_singular_check(zitrus, std::vector<Rational>{0, 1, 0}, zero).verdict ==
              ObstructionVerdict::Obstructed,
          "zitrus convex singular point");
  c.check(convex_singular_check(sc, std::vector<Rational>{2, 0, 0}, zero, true).verdict ==
              ObstructionVerdict::WitnessInvalid,
          "sphere-cylinder witness at (2,0,0)");
  return c.report();
}

bool criterion6() {
  Criterion c(6);
  const auto P = pencil_from_json(load("twodisks_pencil.json"));
  const std::vector<std::pair<std::vector<double>, VerdictKind>> points{
      {{1.5, 0.5}, VerdictKind::In}, {{2.0, 0.0}, VerdictKind::In}, {{2.05, 0.0}, VerdictKind::Out}};
  for (const auto& [x, expect] : points) {
    const auto pr = projection_member(P, x);
    const auto cl = closure_member(P, x);
    const std::string at = "(" + num(x[0]) + "," + num(x[1]) + ")";
    c.check(pr.kind == expect, "projection " + at + " " + to_string(pr.kind));
    c.check(cl.kind == expect, "closure " + at + " " + to_string(cl.kind));
  }
  const auto D = pencil_from_json(load("disk_pencil.json"));
  const std::vector<std::string> xy{"X", "Y"};
  auto E = [&](const char* s) { return parse_expression<Rational>(s, xy); };
  c.check(polar_member(D, E("2+X")).status == PencilFeasibility::Feasible, "polar 2+X");
  c.check(polar_member(D, E("3+X")).status == PencilFeasibility::Feasible, "polar 3+X");
  c.check(polar_member(D, E("1-2X")).status == PencilFeasibility::Infeasible, "polar 1-2X");
  for (const char* p : {"3+X", "2+X"}) {
    const auto r = pencil_qm_member(P, 0, E(p));
    c.check(r.status == PencilFeasibility::Feasible && r.certificate && r.certificate->replay_residual <= 1e-6,
            std::string("pencil QM d=0 ") + p + " " + to_string(r.status));
  }
  for (int d = 0; d <= 2; ++d) {
    const auto r = pencil_qm_member(P, d, E("X+Y-10"));
    c.check(r.status == PencilFeasibility::Infeasible,
            "pencil QM X+Y-10 at d=" + std::to_string(d) + " " + to_string(r.status));
  }
  return c.report();
}

bool criterion7() {
  using namespace specshadow::oracle;
  Criterion c(7);
  std::mt19937 rng(424242);
  for (int inst = 0; inst < 50; ++inst) {
    const int k = 2 + inst % 3;
    const Eigen::MatrixXd C = random_sym(rng, k);
    SDPProblem p;
    p.add_block(k);
    double oracle_value = 0.0;
    if (inst % 2 == 0) {
      // min C∘X s.t. tr X = 1 equals the smallest eigenvalue of C.
      const int r = p.add_constraint(1.0);
      for (int i = 0; i < k; ++i) {
        p.add_block_coefficient(r, 0, i, i, 1.0);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
      oracle_value = es.eigenvalues()(0);
    } else {
      const Eigen::MatrixXd Cp = random_pd(rng, k);
      const Eigen::MatrixXd A1 = random_sym(rng, k), A2 = random_sym(rng, k);
      const Eigen::MatrixXd X0 = random_pd(rng, k);
      const Eigen::Vector2d b(A1.cwiseProduct(X0).sum(), A2.cwiseProduct(X0).sum());
      set_dense(p, p.add_constraint(b(0)), A1);
      set_dense(p, p.add_constraint(b(1)), A2);
      oracle_value = dual_oracle(Cp, A1, A2, b, Cp.cwiseProduct(X0).sum() + 1.0);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          p.add_objective_block(0, i, j, Cp(i, j));
        }
      }
    }
    if (inst % 2 == 0) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          p.add_objective_block(0, i, j, C(i, j));
        }
      }
    }
    const auto sol = solve(p);
    c.check(sol.status == SolveStatus::Optimal && std::abs(sol.primal_objective - oracle_value) <= 1e-4,
            "random instance " + std::to_string(inst) + ": " + num(sol.primal_objective) + " vs " + num(oracle_value));
  }

  auto unit_diagonal = [] {
    SDPProblem p;
    p.add_block(2);
    p.add_block_coefficient(p.add_constraint(1.0), 0, 0, 0, 1.0);
    p.add_block_coefficient(p.add_constraint(1.0), 0, 1, 1, 1.0);
    return p;
  };
  SDPProblem mx = unit_diagonal();
  mx.add_objective_block(0, 0, 1, 1.0);
  const auto sol = solve(mx);
  c.check(sol.status == SolveStatus::Optimal && std::abs(sol.primal_objective + 1.0) <= 1e-7,
          "min x over [[1,x],[x,1]] = " + num(sol.primal_objective));

  SDPProblem big = unit_diagonal();
  big.add_block_coefficient(big.add_constraint(1.5), 0, 0, 1, 1.0);
  big.set_sense(Sense::Feasibility);
  const auto inf = solve(big);
  c.check(inf.status == SolveStatus::Infeasible && verify_infeasibility(big, inf), "x = 1.5 certificate");

  SDPProblem neg;
  neg.add_block(3);
  neg.add_block_coefficient(neg.add_constraint(-2.0), 0, 1, 1, 1.0);
  neg.set_sense(Sense::Feasibility);
  const auto inf2 = solve(neg);
  c.check(inf2.status == SolveStatus::Infeasible && verify_infeasibility(neg, inf2), "negative diagonal certificate");
  return c.report();
}

// Points of each bundled set (or real variety) used for the lower side of
// the sandwich h_S(u) <= h_d(u).
std::vector<std::vector<double>> sample_set(const SemialgebraicSet& S) {
  std::vector<std::vector<double>> pts;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const std::vector<double> x{-2.5 + 5.0 * i / n, -2.5 + 5.0 * j / n};
      if (S.contains(x, 0.0)) {
        pts.push_back(x);
      }
    }
  }
  return pts;
}

std::vector<std::vector<double>> sample_variety(const std::string& name) {
  std::vector<std::vector<double>> pts;
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    if (name == "circle.json") {
      pts.push_back({std::cos(a), std::sin(a)});
    } else if (name == "sphere_cylinder.json") {
      const double z = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::cos(a)));
      pts.push_back({1.0 + std::cos(a), std::sin(a), z});
      pts.push_back({1.0 + std::cos(a), std::sin(a), -z});
    } else {
      for (int j = 0; j <= n; ++j) {
        const double y = -1.0 + 2.0 * j / n;
        const double r = std::pow(1.0 - y * y, 1.5);
        pts.push_back({r * std::cos(a), y, r * std::sin(a)});
      }
    }
  }
  return pts;
}

std::vector<std::vector<double>> directions(std::size_t dim) {
  std::vector<std::vector<double>> out;
  if (dim == 2) {
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 16 + 0.1;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (double s : {-1.0, 1.0}) {
      std::vector<double> u(3, 0.0);
      u[i] = s;
      out.push_back(u);
    }
  }
  const double r = 1.0 / std::sqrt(3.0);
  for (double a : {-r, r}) {
    for (double b : {-r, r}) {
      for (double c : {-r, r}) {
        out.push_back({a, b, c});
      }
    }
  }
  return out;
}

bool criterion8() {
  Criterion c(8);
  struct Family {
    std::string name;
    std::size_t dim;
    std::function<SupportResult(int, const std::vector<double>&)> support;
    std::vector<std::vector<double>> points;
  };
  std::vector<Family> families;
  for (const char* name : {"counterexample.json", "cusp.json", "twodisks.json", "nonexposed.json", "square.json"}) {
    auto S = std::make_shared<SemialgebraicSet>(set_from_json(load(name)));
    families.push_back({name, S->dim(),
                        [S](int d, const std::vector<double>& u) { return lasserre_support(*S, d, u); },
                        sample_set(*S)});
  }
  for (const char* name : {"circle.json", "sphere_cylinder.json", "zitrus.json"}) {
    auto I = std::make_shared<IdealSpec>(ideal_from_json(load(name)));
    families.push_back({name, I->dim(), [I](int d, const std::vector<double>& u) { return theta_support(*I, d, u); },
                        sample_variety(name)});
  }

  for (const auto& f : families) {
    for (const auto& u : directions(f.dim)) {
      double sampled = -kInf;
      for (const auto& x : f.points) {
        double v = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
          v += u[k] * x[k];
        }
        sampled = std::max(sampled, v);
      }
      double prev = kInf;
      for (int d = 1; d <= 3; ++d) {
        const auto r = f.support(d, u);
        const double h = support_value(r);
        std::string where = f.name + " d=" + std::to_string(d) + " u=(";
        for (double x : u) {
          where += num(x) + " ";
        }
        where += ")";
        c.check(!std::isnan(h), where + " solver " + to_string(r.status));
        if (std::isnan(h)) {
          continue;
        }
        c.check(h <= prev + 1e-6 * (1.0 + std::abs(h)), where + " monotonicity " + num(h) + " > " + num(prev));
        c.check(h >= sampled - 1e-6, where + " sandwich " + num(h) + " < sampled " + num(sampled));
        if (r.certificate) {
          c.check(r.certificate->replay_residual <= 1e-6, where + " replay " + num(r.certificate->replay_residual));
        }
        prev = h;
      }
    }
  }
  return c.report();
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (const auto& run : criteria) {
    try {
      failed += run() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cout << "    exception: " << e.what() << '\n';
      ++failed;
    }
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAIL") << '\n';
  return failed == 0 ? 0 : 1;
}

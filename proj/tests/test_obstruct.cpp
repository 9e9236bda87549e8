#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "specshadow/obstruct/obstruct.hpp"
#include "specshadow/relax/relax.hpp"

using namespace specshadow;

namespace {

const std::vector<std::string> XY{"X", "Y"};
const std::vector<std::string> XYZ{"X", "Y", "Z"};

SemialgebraicSet make_set(const std::vector<std::string>& ineqs, const std::vector<std::string>& vars = XY) {
  std::vector<QPoly> ps;
  for (const auto& s : ineqs) {
    ps.push_back(parse_expression<Rational>(s, vars));
  }
  return SemialgebraicSet(vars, ps);
}

IdealSpec make_ideal(const std::vector<std::string>& gens, const std::vector<std::string>& vars) {
  std::vector<QPoly> ps;
  for (const auto& s : gens) {
    ps.push_back(parse_expression<Rational>(s, vars));
  }
  return IdealSpec(vars, ps);
}

SemialgebraicSet cusp() { return make_set({"-X^4+X^3-Y^2"}); }
SemialgebraicSet nonexposed() { return make_set({"Y", "1-Y", "X+1", "Y^2-X^3"}); }
SemialgebraicSet square() { return make_set({"1-X", "1+X", "1-Y", "1+Y"}); }
SemialgebraicSet two_disks() { return make_set({"-X^4-Y^4-2X^2Y^2+4X^2"}); }

std::vector<Rational> q(std::initializer_list<const char*> xs) {
  std::vector<Rational> out;
  for (const char* s : xs) {
    out.push_back(parse_rational(s));
  }
  return out;
}

}  // namespace

TEST(LineObstruction, CuspExactAndFloat) {
  const auto S = cusp();
  const auto exact = line_obstruction(S, q({"0", "0"}), q({"1", "0"}));
  EXPECT_EQ(exact.verdict, ObstructionVerdict::Obstructed);
  ASSERT_EQ(exact.active.size(), 1u);
  EXPECT_EQ(sgn(*exact.gradients[0].inner), 0);
  const auto fl = line_obstruction(S, std::vector<double>{0, 0}, std::vector<double>{1, 0});
  EXPECT_EQ(fl.verdict, ObstructionVerdict::Obstructed);
}

TEST(LineObstruction, NonExposedSet) {
  const auto rep = line_obstruction(nonexposed(), q({"0", "0"}), q({"1", "0"}));
  EXPECT_EQ(rep.verdict, ObstructionVerdict::Obstructed);
  EXPECT_EQ(rep.active, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(rep.gradients[0].gradient, q({"0", "1"}));
  EXPECT_EQ(rep.gradients[3].gradient, q({"0", "0"}));
}

TEST(LineObstruction, TangentLineOfCircleIsNotApplicable) {
  const auto S = make_set({"1-X^2-Y^2"});
  EXPECT_EQ(line_obstruction(S, q({"1", "0"}), q({"0", "1"})).verdict, ObstructionVerdict::NotApplicable);
}

TEST(LineObstruction, HypothesesAreLabelled) {
  const auto rep = line_obstruction(cusp(), q({"0", "0"}), q({"1", "0"}));
  int asserted = 0, verified = 0;
  for (const auto& h : rep.hypotheses) {
    asserted += h.status == HypothesisStatus::Asserted;
    verified += h.status == HypothesisStatus::Verified;
  }
  EXPECT_EQ(asserted, 1);
  EXPECT_EQ(verified, 2);
  const json doc = report_to_json(rep);
  EXPECT_EQ(doc["verdict"], "obstructed");
  EXPECT_EQ(doc["hypotheses"].size(), 3u);
}

TEST(LineObstruction, PointOutsideIsInputError) {
  EXPECT_THROW(line_obstruction(cusp(), q({"-1", "0"}), q({"1", "0"})), InputError);
  EXPECT_THROW(line_obstruction(cusp(), q({"0", "0"}), q({"0", "0"})), InputError);
}

TEST(SingularPoint, Examples) {
  EXPECT_EQ(singular_point_obstruction(cusp(), q({"0", "0"})).verdict, ObstructionVerdict::Obstructed);

  const auto disks = singular_point_obstruction(two_disks(), q({"1", "1"}));
  EXPECT_EQ(disks.verdict, ObstructionVerdict::NotObstructed);
  EXPECT_EQ(disks.gradients[0].gradient, q({"0", "-8"}));

  const auto c = singular_point_obstruction(cusp(), q({"1", "0"}));
  EXPECT_EQ(c.verdict, ObstructionVerdict::NotObstructed);
  EXPECT_EQ(c.gradients[0].gradient, q({"-1", "0"}));
}

TEST(SingularPoint, ImpliesLineConditionForEveryDirection) {
  const auto S = cusp();
  ASSERT_EQ(singular_point_obstruction(S, q({"0", "0"})).verdict, ObstructionVerdict::Obstructed);
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> num(-20, 20);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rational> dir{Rational(num(rng), 7), Rational(num(rng) + 41, 3)};
    const auto rep = line_obstruction(S, q({"0", "0"}), dir);
    EXPECT_NE(rep.verdict, ObstructionVerdict::NotObstructed);
    EXPECT_EQ(rep.hypotheses[0].status, HypothesisStatus::Verified);
  }
}

TEST(NonExposedFace, Examples) {
  EXPECT_EQ(nonexposed_face_check(nonexposed(), q({"0", "0"}), q({"-1/2", "0"})).verdict,
            ObstructionVerdict::Obstructed);
  EXPECT_EQ(nonexposed_face_check(square(), q({"1", "1"}), q({"1", "0"})).verdict,
            ObstructionVerdict::NotObstructed);
  EXPECT_EQ(nonexposed_face_check(cusp(), q({"0", "0"}), q({"1/2", "0"})).verdict, ObstructionVerdict::Obstructed);
  EXPECT_THROW(nonexposed_face_check(square(), q({"1", "1"}), q({"1", "1"})), InputError);
}

TEST(NonExposedFace, FloatModeAgrees) {
  EXPECT_EQ(nonexposed_face_check(nonexposed(), std::vector<double>{0, 0}, std::vector<double>{-0.5, 0}).verdict,
            ObstructionVerdict::Obstructed);
  EXPECT_EQ(nonexposed_face_check(square(), std::vector<double>{1, 1}, std::vector<double>{1, 0}).verdict,
            ObstructionVerdict::NotObstructed);
}

TEST(ConvexSingular, Examples) {
  const auto zitrus = make_ideal({"X^2+Z^2+(Y^2-1)^3"}, XYZ);
  const auto z = convex_singular_check(zitrus, q({"0", "1", "0"}), q({"0", "0", "0"}));
  EXPECT_EQ(z.verdict, ObstructionVerdict::Obstructed);
  EXPECT_TRUE(z.generator_caveat);
  EXPECT_EQ(z.gradients[0].gradient, q({"0", "0", "0"}));

  const auto sc = make_ideal({"X^2+Y^2+Z^2-4", "(X-1)^2+Y^2-1"}, XYZ);
  const auto s = convex_singular_check(sc, q({"2", "0", "0"}), q({"0", "0", "0"}), true);
  EXPECT_EQ(s.verdict, ObstructionVerdict::WitnessInvalid);
  EXPECT_FALSE(s.generator_caveat);
  EXPECT_EQ(*s.gradients[0].inner, Rational(-8));

  const auto circle = make_ideal({"X^2+Y^2-1"}, XY);
  const auto c = convex_singular_check(circle, q({"1", "0"}), q({"0", "0"}));
  EXPECT_EQ(c.verdict, ObstructionVerdict::WitnessInvalid);
  EXPECT_EQ(*c.gradients[0].inner, Rational(-2));
}

TEST(ConvexSingular, PointOffVarietyIsInputError) {
  const auto circle = make_ideal({"X^2+Y^2-1"}, XY);
  EXPECT_THROW(convex_singular_check(circle, q({"1", "1"}), q({"0", "0"})), InputError);
}

TEST(ExactMode, ReportsAreReproducible) {
  const auto a = report_to_json(line_obstruction(nonexposed(), q({"0", "0"}), q({"-1/2", "0"}))).dump();
  const auto b = report_to_json(line_obstruction(nonexposed(), q({"0", "0"}), q({"-1/2", "0"}))).dump();
  EXPECT_EQ(a, b);
}

// Every Obstructed line instance should show a relaxation strictly larger
// than the sampled hull. The outward direction along the line is tilted
// by a normal component so that it exposes the base point's face.
TEST(ConsistencyWithRelax, ObstructedLinesShowStrictContainment) {
  struct Case {
    SemialgebraicSet S;
    std::vector<double> a, dir;
  };
  const std::vector<Case> cases{
      {cusp(), {0, 0}, {1, 0}}, {nonexposed(), {0, 0}, {1, 0}}, {nonexposed(), {0, 0}, {-0.5, 0}}};
  for (const auto& c : cases) {
    ASSERT_EQ(line_obstruction(c.S, c.a, c.dir).verdict, ObstructionVerdict::Obstructed);
    // Outward: the side of a along the line on which S is absent nearby.
    const double eps = 1e-3;
    const std::vector<double> fwd{c.a[0] + eps * c.dir[0], c.a[1] + eps * c.dir[1]};
    const double s = c.S.contains(fwd, 0.0) ? -1.0 : 1.0;
    const std::vector<double> out{s * c.dir[0], s * c.dir[1]};
    const std::vector<double> normal{-out[1], out[0]};
    for (int d = 1; d <= 2; ++d) {
      double excess = -1.0;
      for (double tilt : {0.0, 10.0, -10.0}) {
        const double ux = out[0] + tilt * normal[0], uy = out[1] + tilt * normal[1];
        const double nrm = std::hypot(ux, uy);
        const std::vector<double> u{ux / nrm, uy / nrm};
        double sampled = -1e300;
        for (int i = 0; i <= 600; ++i) {
          for (int j = 0; j <= 600; ++j) {
            const std::vector<double> x{-1.5 + 3.0 * i / 600, -1.5 + 3.0 * j / 600};
            if (c.S.contains(x, 0.0)) {
              sampled = std::max(sampled, u[0] * x[0] + u[1] * x[1]);
            }
          }
        }
        const auto r = lasserre_support(c.S, d, u);
        if (r.status == SupportResult::Status::Unbounded) {
          excess = std::numeric_limits<double>::infinity();
        } else if (r.status == SupportResult::Status::Finite) {
          excess = std::max(excess, r.value - sampled);
        }
      }
      EXPECT_GE(excess, 1e-6) << "d=" << d;
    }
  }
}

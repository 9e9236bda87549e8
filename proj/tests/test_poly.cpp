#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "specshadow/poly/io.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/poly/reduce.hpp"

using namespace specshadow;

namespace {

const std::vector<std::string> XY{"X", "Y"};

QPoly P(const std::string& s, const std::vector<std::string>& vars = XY) { return parse_expression<Rational>(s, vars); }

Rational frac(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

QPoly random_poly(std::mt19937& rng, std::size_t n, int max_deg, int terms) {
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < n; ++i) {
    vars.push_back("V" + std::to_string(i));
  }
  std::uniform_int_distribution<int> e(0, max_deg), c(-9, 9), den(1, 4);
  QPoly p(vars);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> exps(n);
    int total = 0;
    for (auto& x : exps) {
      x = e(rng);
      total += x;
    }
    if (total > max_deg) {
      continue;
    }
    p.add_term(Monomial(exps), frac(c(rng), den(rng)));
  }
  return p;
}

using TermMap = std::map<std::vector<int>, Rational>;

// Term-by-term product on raw exponent maps.
TermMap naive_product(const QPoly& p, const QPoly& q) {
  TermMap out;
  for (const auto& [m1, c1] : p.terms()) {
    for (const auto& [m2, c2] : q.terms()) {
      std::vector<int> e(m1.exponents().begin(), m1.exponents().end());
      for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] += m2[k];
      }
      out[e] += c1 * c2;
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = sgn(it->second) == 0 ? out.erase(it) : std::next(it);
  }
  return out;
}

TermMap as_map(const QPoly& p) {
  TermMap out;
  for (const auto& [m, c] : p.terms()) {
    out[std::vector<int>(m.exponents().begin(), m.exponents().end())] = c;
  }
  return out;
}

}  // namespace

TEST(ParsePolynomial, CuspDocument) {
  const json doc = json::parse(
      R"({"vars":["X","Y"],"terms":[{"c":"-1","e":[4,0]},{"c":"1","e":[3,0]},{"c":"-1","e":[0,2]}]})");
  const auto p = polynomial_from_json<Rational>(doc);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.degree(), 4);
  EXPECT_EQ(p, P("-X^4+X^3-Y^2"));
}

TEST(ParsePolynomial, EmptyTermsIsZero) {
  const auto p = polynomial_from_json<Rational>(json::parse(R"({"vars":["X","Y"],"terms":[]})"));
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), -1);
}

TEST(ParsePolynomial, Errors) {
  EXPECT_THROW(polynomial_from_json<Rational>(json::parse(R"({"vars":["X","Y"],"terms":[{"c":"1","e":[-1,0]}]})")),
               InputError);
  EXPECT_THROW(polynomial_from_json<Rational>(json::parse(R"({"vars":["X","Y"],"terms":[{"c":"1","e":[1]}]})")),
               InputError);
  EXPECT_THROW(polynomial_from_json<Rational>(json::parse(R"({"vars":["X","Y"],"terms":[{"c":"1/0","e":[1,0]}]})")),
               InputError);
  EXPECT_THROW(polynomial_from_json<Rational>(json::parse(R"({"vars":["X","Y"],"terms":[{"c":"abc","e":[1,0]}]})")),
               InputError);
}

TEST(ParsePolynomial, CoefficientForms) {
  const auto p = polynomial_from_json<Rational>(
      json::parse(R"({"vars":["X"],"terms":[{"c":"0.25","e":[1]},{"c":"-3/6","e":[0]},{"c":7,"e":[2]}]})"));
  EXPECT_EQ(p.coefficient(Monomial({1})), Rational(1, 4));
  EXPECT_EQ(p.coefficient(Monomial({0})), Rational(-1, 2));
  EXPECT_EQ(p.coefficient(Monomial({2})), Rational(7));
  // Lowest terms with positive denominator.
  EXPECT_EQ(p.coefficient(Monomial({0})).get_den(), 2);
}

TEST(ParsePolynomial, FloatMode) {
  const auto p = polynomial_from_json<double>(json::parse(R"({"vars":["X"],"terms":[{"c":"1/3","e":[1]}]})"));
  EXPECT_DOUBLE_EQ(p.coefficient(Monomial({1})), 1.0 / 3.0);
}

TEST(ParsePolynomial, JsonRoundTrip) {
  const auto p = P("-X^4-Y^4-2X^2Y^2+4X^2");
  EXPECT_EQ(polynomial_from_json<Rational>(polynomial_to_json(p)), p);
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(P("-X^4-Y^4-2X^2Y^2+4X^2").evaluate({Rational(1), Rational(1)}), 0);
  EXPECT_EQ(QPoly(XY).evaluate({Rational(3), Rational(-2)}), 0);
  EXPECT_EQ(P("-X^4+X^3-Y^2").evaluate({Rational(1), Rational(0)}), 0);
  EXPECT_THROW(P("X").evaluate({Rational(1)}), InputError);
}

TEST(Gradient, Examples) {
  auto at = [](const QPoly& p, const std::vector<Rational>& x) {
    std::vector<Rational> g;
    for (const auto& d : p.gradient()) {
      g.push_back(d.evaluate(x));
    }
    return g;
  };
  EXPECT_EQ(at(P("-X^4+X^3-Y^2"), {0, 0}), (std::vector<Rational>{0, 0}));
  const std::vector<std::string> XYZ{"X", "Y", "Z"};
  EXPECT_EQ(at(P("X^2+Z^2+(Y^2-1)^3", XYZ), {0, 1, 0}), (std::vector<Rational>{0, 0, 0}));
  const auto g = P("Y-3X+2").gradient();
  EXPECT_EQ(g[0], QPoly::constant(XY, Rational(-3)));
  EXPECT_EQ(g[1], QPoly::constant(XY, Rational(1)));
}

TEST(Arithmetic, Examples) {
  const std::vector<std::string> X{"X"};
  EXPECT_EQ(P("(X-1)^2", X) * P("X+1", X), P("X^3-X^2-X+1", X));
  const auto p = P("Y-X^3");
  EXPECT_EQ(p + QPoly(XY), p);
  // ℓ_1 = (X−1)² + (Y−X³) + (X−1)²(X+1).
  EXPECT_EQ(P("(X-1)^2") + P("Y-X^3") + P("(X-1)^2*(X+1)"), P("Y-3X+2"));
}

TEST(Arithmetic, VariableMismatchIsError) { EXPECT_THROW(P("X") + P("X", {"X"}), InputError); }

TEST(MonomialBasis, Examples) {
  const auto b = monomial_basis(2, 1);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], Monomial({0, 0}));
  EXPECT_EQ(b[1], Monomial({1, 0}));
  EXPECT_EQ(b[2], Monomial({0, 1}));
  EXPECT_EQ(monomial_basis(2, 2).size(), 6u);
  EXPECT_EQ(monomial_basis(3, 2).size(), 10u);
}

TEST(MonomialBasis, SizeDistinctAndSorted) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 5; ++d) {
      const auto b = monomial_basis(n, d);
      EXPECT_EQ(b.size(), binomial(n + static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
      std::set<Monomial> seen(b.begin(), b.end());
      EXPECT_EQ(seen.size(), b.size());
      for (std::size_t i = 1; i < b.size(); ++i) {
        EXPECT_LE(b[i - 1].degree(), b[i].degree());
      }
    }
  }
}

TEST(ReduceModRules, Examples) {
  const std::vector<std::string> cs{"c", "s"};
  RuleSet<Rational> trig({{1, 2, P("1-c^2", cs)}});
  EXPECT_EQ(reduce_mod_rules(P("s^2+c^2", cs), trig), QPoly::constant(cs, Rational(1)));
  RuleSet<Rational> circle({{1, 2, P("1-X^2")}});
  EXPECT_TRUE(reduce_mod_rules(P("(1-X)^2+Y^2-(2-2X)"), circle).is_zero());
}

TEST(ReduceModRules, RejectsNonTerminatingRules) {
  // Y^2 -> X^2 together with X^2 -> Y^2 would loop.
  EXPECT_THROW(RuleSet<Rational>({{1, 2, P("X^2")}, {0, 2, P("Y^2")}}), InputError);
  // A rule that does not lower its own exponent.
  EXPECT_THROW(RuleSet<Rational>({{1, 2, P("Y^3")}}), InputError);
}

TEST(ReduceModRules, Idempotent) {
  std::mt19937 rng(23);
  RuleSet<Rational> rules({{1, 2, P("1-X^2")}});
  for (int trial = 0; trial < 30; ++trial) {
    const QPoly p = random_poly(rng, 2, 6, 8);
    QPoly r(XY);
    for (const auto& [m, c] : p.terms()) {
      r.add_term(m, c);
    }
    const auto nf = reduce_mod_rules(r, rules);
    EXPECT_EQ(reduce_mod_rules(nf, rules), nf);
    for (const auto& [m, c] : nf.terms()) {
      EXPECT_LT(m[1], 2);
    }
  }
}

TEST(Properties, RingAxiomsAgainstTermOracle) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_poly(rng, 3, 3, 5);
    const auto q = random_poly(rng, 3, 3, 5);
    const auto r = random_poly(rng, 3, 3, 5);
    EXPECT_EQ(as_map(p * q), naive_product(p, q));
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ(p + q, q + p);
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ((p + q) + r, p + (q + r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    EXPECT_TRUE((p - p).is_zero());
  }
}

TEST(Properties, EvaluationIsMultiplicative) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> c(-7, 7), den(1, 5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_poly(rng, 2, 4, 6);
    const auto q = random_poly(rng, 2, 4, 6);
    const std::vector<Rational> x{frac(c(rng), den(rng)), frac(c(rng), den(rng))};
    EXPECT_EQ((p * q).evaluate(x), p.evaluate(x) * q.evaluate(x));

    const auto pf = p.cast<double>(), qf = q.cast<double>();
    const std::vector<double> xf{u(rng), u(rng)};
    const double lhs = (pf * qf).evaluate(xf);
    const double rhs = pf.evaluate(xf) * qf.evaluate(xf);
    // Scale by the sum of absolute term values to bound cancellation.
    double mag = 0.0;
    for (const auto& [m1, c1] : pf.terms()) {
      for (const auto& [m2, c2] : qf.terms()) {
        mag += std::abs(c1 * c2) * std::pow(2.0, m1.degree() + m2.degree());
      }
    }
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, mag));
  }
}

TEST(Properties, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_poly(rng, 3, 4, 7).cast<double>();
    const auto grad = p.gradient();
    std::vector<double> x{u(rng), u(rng), u(rng)};
    for (std::size_t k = 0; k < 3; ++k) {
      auto xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
      EXPECT_NEAR(fd, grad[k].evaluate(x), 1e-6);
    }
  }
}

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "specshadow/error.hpp"
#include "specshadow/poly/io.hpp"
#include "specshadow/poly/polynomial.hpp"

namespace specshadow {

/// S(p) = {x : p_1(x) >= 0, ..., p_r(x) >= 0}. An empty inequality list
/// is allowed and describes the whole space (QM reduces to plain SOS).
struct SemialgebraicSet {
  std::vector<std::string> vars;
  std::vector<QPoly> inequalities;

  SemialgebraicSet() = default;
  SemialgebraicSet(std::vector<std::string> v, std::vector<QPoly> ineqs)
      : vars(std::move(v)), inequalities(std::move(ineqs)) {
    require(!vars.empty(), "a set needs at least one variable");
    for (const auto& p : inequalities) {
      require(p.vars() == vars, "inequality variables disagree with the set");
    }
  }

  std::size_t dim() const { return vars.size(); }

  /// Largest inequality degree (0 when there are none).
  int nu() const {
    int m = 0;
    for (const auto& p : inequalities) {
      m = std::max(m, p.degree());
    }
    return m;
  }

  bool contains(const std::vector<Rational>& x) const {
    for (const auto& p : inequalities) {
      if (sgn(p.evaluate(x)) < 0) {
        return false;
      }
    }
    return true;
  }

  bool contains(const std::vector<double>& x, double tol) const {
    for (const auto& p : inequalities) {
      if (p.evaluate_double(x) < -tol) {
        return false;
      }
    }
    return true;
  }
};

/// Generators g_1..g_k of an ideal I; V_R(I) is their common real zero set.
struct IdealSpec {
  std::vector<std::string> vars;
  std::vector<QPoly> generators;

  IdealSpec() = default;
  IdealSpec(std::vector<std::string> v, std::vector<QPoly> gens)
      : vars(std::move(v)), generators(std::move(gens)) {
    require(!vars.empty(), "an ideal needs at least one variable");
    require(!generators.empty(), "an ideal needs at least one generator");
    for (const auto& g : generators) {
      require(g.vars() == vars, "generator variables disagree with the ideal");
    }
  }

  std::size_t dim() const { return vars.size(); }
};

namespace detail {

inline std::vector<QPoly> polynomial_list(const json& doc, const char* key,
                                          const std::vector<std::string>& vars, bool exact) {
  require(doc.contains(key) && doc[key].is_array(),
          std::string("document needs a \"") + key + "\" array");
  std::vector<QPoly> out;
  for (const auto& p : doc[key]) {
    if (exact) {
      out.push_back(polynomial_from_json<Rational>(p, vars));
    } else {
      // Float mode: coefficients are rounded to binary64 before use.
      out.push_back(polynomial_from_json<double>(p, vars).template cast<Rational>());
    }
  }
  return out;
}

}  // namespace detail

inline SemialgebraicSet set_from_json(const json& doc, bool exact = true) {
  auto vars = parse_vars(doc);
  return SemialgebraicSet(vars, detail::polynomial_list(doc, "inequalities", vars, exact));
}

inline json set_to_json(const SemialgebraicSet& s) {
  json doc;
  doc["vars"] = s.vars;
  doc["inequalities"] = json::array();
  for (const auto& p : s.inequalities) {
    doc["inequalities"].push_back(polynomial_to_json(p, false));
  }
  return doc;
}

inline IdealSpec ideal_from_json(const json& doc, bool exact = true) {
  auto vars = parse_vars(doc);
  return IdealSpec(vars, detail::polynomial_list(doc, "generators", vars, exact));
}

inline json ideal_to_json(const IdealSpec& s) {
  json doc;
  doc["vars"] = s.vars;
  doc["generators"] = json::array();
  for (const auto& g : s.generators) {
    doc["generators"].push_back(polynomial_to_json(g, false));
  }
  return doc;
}

}  // namespace specshadow

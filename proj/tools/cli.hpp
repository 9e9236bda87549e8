#pragma once

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "specshadow/specshadow.hpp"

namespace specshadow::cli {

enum ExitCode : int { kTrue = 0, kFalse = 1, kInaccurate = 2, kInputError = 3 };

struct Options {
  std::string command;
  std::string set_file, ideal_file, pencil_file;
  int degree = -1;
  std::string point, dir, witness, poly, map;
  double tol = -1.0;
  double box = -1.0;
  std::string out;
  std::string format = "text";
  std::string mode = "exact";
  int dirs = 360;
  bool real_radical = false;

  bool exact() const { return mode == "exact"; }
};

/// Structured report plus the exit code it maps to.
struct Outcome {
  int code = kTrue;
  json report = json::object();
};

namespace detail {

inline json load_document(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    out.push_back(cur);
  }
  return out;
}

inline std::vector<Rational> parse_vector(const std::string& text, const char* what) {
  require(!text.empty(), std::string("--") + what + " is required");
  std::vector<Rational> out;
  for (const auto& s : split(text, ',')) {
    out.push_back(parse_rational(s));
  }
  return out;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& q : v) {
    out.push_back(to_double(q));
  }
  return out;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Polynomial from --poly: a path to a polynomial document or an inline
/// expression over `vars`. Float mode rounds coefficients to binary64.
inline QPoly load_polynomial(const Options& o, const std::string& text, const std::vector<std::string>& vars) {
  require(!text.empty(), "--poly is required");
  if (text.size() > 5 && text.ends_with(".json")) {
    const json doc = load_document(text);
    return o.exact() ? polynomial_from_json<Rational>(doc, vars)
                     : polynomial_from_json<double>(doc, vars).cast<Rational>();
  }
  return o.exact() ? parse_expression<Rational>(text, vars) : parse_expression<double>(text, vars).cast<Rational>();
}

inline SemialgebraicSet load_set(const Options& o) {
  require(!o.set_file.empty(), o.command + " needs --set");
  return set_from_json(load_document(o.set_file), o.exact());
}

inline IdealSpec load_ideal(const Options& o) {
  require(!o.ideal_file.empty(), o.command + " needs --ideal");
  return ideal_from_json(load_document(o.ideal_file), o.exact());
}

inline MatrixPencil load_pencil(const Options& o) {
  require(!o.pencil_file.empty(), o.command + " needs --pencil");
  return pencil_from_json(load_document(o.pencil_file));
}

inline int require_degree(const Options& o) {
  require(o.degree >= 0, o.command + " needs --degree");
  return o.degree;
}

inline RelaxOptions relax_options(const Options& o) {
  RelaxOptions r;
  if (o.tol > 0) {
    r.tol = o.tol;
  }
  return r;
}

inline PencilOptions pencil_options(const Options& o) {
  PencilOptions p;
  if (o.tol > 0) {
    p.tol = o.tol;
  }
  if (o.box > 0) {
    p.box = o.box;
  }
  return p;
}

inline ObstructionOptions obstruction_options(const Options& o) {
  ObstructionOptions p;
  if (o.tol > 0) {
    p.tol = o.tol;
  }
  if (o.box > 0) {
    p.box = o.box;
  }
  return p;
}

inline void write_out(const Options& o, const json& doc, Outcome& r) {
  if (o.out.empty()) {
    return;
  }
  std::ofstream f(o.out);
  require(f.good(), "cannot write '" + o.out + "'");
  f << doc.dump(2) << '\n';
  r.report["certificate_file"] = o.out;
}

inline void add_warnings(Outcome& r, const std::vector<std::string>& w) {
  if (!w.empty()) {
    r.report["warnings"] = w;
  }
}

inline int code_for(VerdictKind k) {
  switch (k) {
    case VerdictKind::In:
      return kTrue;
    case VerdictKind::Out:
      return kFalse;
    default:
      return kInaccurate;
  }
}

inline int code_for(Feasibility f) {
  return f == Feasibility::Feasible ? kTrue : f == Feasibility::Infeasible ? kFalse : kInaccurate;
}

inline int code_for(PencilFeasibility f) {
  return f == PencilFeasibility::Feasible ? kTrue : f == PencilFeasibility::Infeasible ? kFalse : kInaccurate;
}

inline int code_for(SupportResult::Status s) { return s == SupportResult::Status::Inaccurate ? kInaccurate : kTrue; }

inline int code_for(ObstructionVerdict v) {
  switch (v) {
    case ObstructionVerdict::Obstructed:
      return kTrue;
    case ObstructionVerdict::NotObstructed:
    case ObstructionVerdict::WitnessInvalid:
      return kFalse;
    case ObstructionVerdict::NotApplicable:
      break;
  }
  return kInaccurate;
}

inline Outcome verdict_outcome(const Options& o, const Verdict& v) {
  Outcome r;
  r.code = code_for(v.kind);
  r.report["verdict"] = to_string(v.kind);
  r.report["optimum"] = v.optimum;
  if (v.kind == VerdictKind::Out) {
    r.report["margin"] = v.margin;
  }
  if (v.separator) {
    r.report["separator"] = v.separator->to_string();
  }
  if (v.low_confidence) {
    r.report["low_confidence"] = true;
  }
  if (!v.notes.empty()) {
    r.report["notes"] = v.notes;
  }
  if (const auto* c = std::get_if<GramCertificate>(&v.certificate)) {
    r.report["replay_residual"] = c->replay_residual;
    write_out(o, certificate_to_json(*c), r);
  } else if (const auto* c = std::get_if<PolarCertificate>(&v.certificate)) {
    r.report["residual"] = c->residual;
    write_out(o, polar_certificate_to_json(*c), r);
  }
  return r;
}

template <class Result>
Outcome gram_membership_outcome(const Options& o, const Result& m) {
  Outcome r;
  r.code = code_for(m.status);
  r.report["status"] = to_string(m.status);
  if (m.certificate) {
    r.report["solver_residual"] = m.certificate->solver_residual;
    r.report["replay_residual"] = m.certificate->replay_residual;
    write_out(o, certificate_to_json(*m.certificate), r);
  }
  add_warnings(r, m.warnings);
  return r;
}

inline Outcome support_outcome(const Options& o, const SupportResult& s) {
  Outcome r;
  r.code = code_for(s.status);
  r.report["status"] = to_string(s.status);
  if (s.status == SupportResult::Status::Finite) {
    r.report["support"] = s.value;
  }
  if (s.certificate) {
    r.report["replay_residual"] = s.certificate->replay_residual;
    write_out(o, certificate_to_json(*s.certificate), r);
  }
  add_warnings(r, s.warnings);
  return r;
}

template <Coefficient F>
Outcome obstruction_outcome(const ObstructionReport<F>& rep) {
  Outcome r;
  r.code = code_for(rep.verdict);
  r.report = report_to_json(rep);
  return r;
}

inline Outcome cmd_qm_member(const Options& o) {
  const auto S = load_set(o);
  return gram_membership_outcome(o, qm_member(S, require_degree(o), load_polynomial(o, o.poly, S.vars),
                                              relax_options(o)));
}

inline Outcome cmd_lasserre_member(const Options& o) {
  const auto S = load_set(o);
  return verdict_outcome(
      o, lasserre_point_member(S, require_degree(o), to_doubles(parse_vector(o.point, "point")), relax_options(o)));
}

inline Outcome cmd_lasserre_support(const Options& o) {
  const auto S = load_set(o);
  return support_outcome(
      o, lasserre_support(S, require_degree(o), to_doubles(parse_vector(o.dir, "dir")), relax_options(o)));
}

inline Outcome cmd_theta_member(const Options& o) {
  const auto I = load_ideal(o);
  return verdict_outcome(
      o, theta_point_member(I, require_degree(o), to_doubles(parse_vector(o.point, "point")), relax_options(o)));
}

inline Outcome cmd_theta_support(const Options& o) {
  const auto I = load_ideal(o);
  return support_outcome(
      o, theta_support(I, require_degree(o), to_doubles(parse_vector(o.dir, "dir")), relax_options(o)));
}

inline Outcome cmd_pushforward_support(const Options& o) {
  const auto S = load_set(o);
  require(!o.map.empty(), "pushforward-support needs --map \"f1;f2;...\"");
  std::vector<QPoly> f;
  for (const auto& s : split(o.map, ';')) {
    f.push_back(load_polynomial(o, s, S.vars));
  }
  return support_outcome(
      o, pushforward_support(S, require_degree(o), f, to_doubles(parse_vector(o.dir, "dir")), relax_options(o)));
}

inline Outcome cmd_pencil_member(const Options& o) {
  const auto P = load_pencil(o);
  const auto pt = pencil_member(P, to_doubles(parse_vector(o.point, "point")));
  Outcome r;
  r.code = pt.member ? kTrue : kFalse;
  r.report["member"] = pt.member;
  r.report["eigmin"] = pt.eigmin;
  return r;
}

inline Outcome cmd_projection_member(const Options& o) {
  return verdict_outcome(o, projection_member(load_pencil(o), to_doubles(parse_vector(o.point, "point")),
                                              pencil_options(o)));
}

inline Outcome cmd_closure_member(const Options& o) {
  return verdict_outcome(o, closure_member(load_pencil(o), to_doubles(parse_vector(o.point, "point")),
                                           pencil_options(o)));
}

inline Outcome cmd_polar_member(const Options& o) {
  const auto P = load_pencil(o);
  const auto res = polar_member(P, load_polynomial(o, o.poly, P.xvars()), pencil_options(o));
  Outcome r;
  r.code = code_for(res.status);
  r.report["status"] = to_string(res.status);
  if (res.certificate) {
    r.report["residual"] = res.certificate->residual;
    write_out(o, polar_certificate_to_json(*res.certificate), r);
  }
  add_warnings(r, res.warnings);
  return r;
}

inline Outcome cmd_pencil_qm_member(const Options& o) {
  const auto P = load_pencil(o);
  const auto res = pencil_qm_member(P, require_degree(o), load_polynomial(o, o.poly, P.xvars()), pencil_options(o));
  Outcome r;
  r.code = code_for(res.status);
  r.report["status"] = to_string(res.status);
  if (res.certificate) {
    r.report["solver_residual"] = res.certificate->solver_residual;
    r.report["replay_residual"] = res.certificate->replay_residual;
    write_out(o, pencil_qm_certificate_to_json(*res.certificate), r);
  }
  add_warnings(r, res.warnings);
  return r;
}

template <Coefficient F>
std::vector<F> coords(const std::vector<Rational>& v) {
  if constexpr (std::is_same_v<F, Rational>) {
    return v;
  } else {
    return to_doubles(v);
  }
}

template <Coefficient F>
Outcome obstruct_in_mode(const Options& o) {
  const auto opt = obstruction_options(o);
  if (o.command == "convex-singular") {
    const auto I = load_ideal(o);
    return obstruction_outcome(convex_singular_check(I, coords<F>(parse_vector(o.point, "point")),
                                                     coords<F>(parse_vector(o.witness, "witness")), o.real_radical,
                                                     opt));
  }
  const auto S = load_set(o);
  const auto a = coords<F>(parse_vector(o.point, "point"));
  if (o.command == "obstruct-line") {
    return obstruction_outcome(line_obstruction(S, a, coords<F>(parse_vector(o.dir, "dir")), opt));
  }
  if (o.command == "obstruct-singular") {
    return obstruction_outcome(singular_point_obstruction(S, a, opt));
  }
  return obstruction_outcome(nonexposed_face_check(S, a, coords<F>(parse_vector(o.witness, "witness")), opt));
}

inline Outcome cmd_obstruct(const Options& o) {
  return o.exact() ? obstruct_in_mode<Rational>(o) : obstruct_in_mode<double>(o);
}

/// One support value per direction θ_k = 2πk/n, computed concurrently and
/// written in direction order.
inline Outcome cmd_sample_boundary(const Options& o, std::ostream& csv) {
  require(o.dirs >= 0, "--dirs must be nonnegative");
  const int d = require_degree(o);
  std::function<SupportResult(const std::vector<double>&)> support;
  std::size_t dim = 0;
  std::optional<SemialgebraicSet> S;
  std::optional<IdealSpec> I;
  const RelaxOptions opt = relax_options(o);
  if (!o.set_file.empty()) {
    S = load_set(o);
    dim = S->dim();
    support = [&](const std::vector<double>& u) { return lasserre_support(*S, d, u, opt); };
  } else {
    I = load_ideal(o);
    dim = I->dim();
    support = [&](const std::vector<double>& u) { return theta_support(*I, d, u, opt); };
  }
  require(dim == 2, "sample-boundary needs a set in the plane");

  const auto n = static_cast<std::size_t>(o.dirs);
  std::vector<std::string> rows(n);
  std::vector<SupportResult::Status> status(n, SupportResult::Status::Finite);
  std::atomic<std::size_t> next{0};
  std::string error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      const std::vector<double> u{std::cos(theta), std::sin(theta)};
      try {
        const SupportResult s = support(u);
        status[k] = s.status;
        double v = std::numeric_limits<double>::quiet_NaN();
        if (s.status == SupportResult::Status::Finite) {
          v = s.value;
        } else if (s.status == SupportResult::Status::Unbounded) {
          v = std::numeric_limits<double>::infinity();
        } else if (s.status == SupportResult::Status::Empty) {
          v = -std::numeric_limits<double>::infinity();
        }
        rows[k] = format_number(theta) + "," + format_number(u[0]) + "," + format_number(u[1]) + "," +
                  format_number(v);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        error = e.what();
        status[k] = SupportResult::Status::Inaccurate;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  require(error.empty(), error);

  csv << "theta,ux,uy,support\n";
  for (const auto& row : rows) {
    csv << row << '\n';
  }
  Outcome r;
  r.report["directions"] = n;
  std::size_t inaccurate = 0;
  for (auto s : status) {
    inaccurate += s == SupportResult::Status::Inaccurate;
  }
  r.report["inaccurate"] = inaccurate;
  r.code = inaccurate > 0 ? kInaccurate : kTrue;
  return r;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// ℓ_a = (2a−1)(X−a)² + (Y−X³) + (X−a)²(X+1) equals Y − 3a²X + 2a³.
/// For a = 3/4 the square root t of 1/2 = 2a−1 is adjoined as a symbol,
/// the first term is written as (t(X−a))², and t² is reduced to 1/2.
inline Check tangent_identity(const Rational& a, bool adjoin_root) {
  const std::vector<std::string> vars{"X", "Y", "t"};
  auto E = [&](const std::string& s) { return parse_expression<Rational>(s, vars); };
  const QPoly Xa = E("X") - QPoly::constant(vars, a);
  QPoly first = adjoin_root ? (E("t") * Xa).pow(2) : Xa.pow(2).scaled(Rational(2) * a - 1);
  QPoly lhs = first + E("Y-X^3") + Xa.pow(2) * E("X+1");
  if (adjoin_root) {
    require(Rational(2) * a - 1 == Rational(1, 2), "adjoined root is sqrt(1/2)");
    lhs = reduce_mod_rules(lhs, RuleSet<Rational>({{2, 2, QPoly::constant(vars, Rational(1, 2))}}));
  }
  const QPoly rhs = E("Y") - E("X").scaled(Rational(3) * a * a) + QPoly::constant(vars, Rational(2) * a * a * a);
  const QPoly diff = lhs - rhs;
  return {"tangent line identity a=" + a.get_str() + (adjoin_root ? " (t^2 -> 1/2)" : ""), diff.is_zero(),
          "residual terms " + std::to_string(diff.size())};
}

/// (8−8c)ℓ_θ = p + (X²+Y²−2+2c)² + 4(1−c)(Y−s)² − 4c(X−c+1)² modulo s² → 1−c².
inline Check two_disk_family_identity() {
  const std::vector<std::string> vars{"X", "Y", "c", "s"};
  auto E = [&](const std::string& s) { return parse_expression<Rational>(s, vars); };
  const QPoly p = E("-X^4-Y^4-2X^2Y^2+4X^2");
  const QPoly lhs = E("8-8c") * E("1-c-c*X-s*Y");
  const QPoly rhs = p + E("(X^2+Y^2-2+2c)^2") + E("4(1-c)") * E("(Y-s)^2") + E("-4c") * E("(X-c+1)^2");
  const QPoly diff = reduce_mod_rules(lhs - rhs, RuleSet<Rational>({{3, 2, E("1-c^2")}}));
  return {"two-disk supporting line family modulo s^2 -> 1-c^2", diff.is_zero(),
          "residual terms " + std::to_string(diff.size())};
}

inline Check two_disk_theta_pi() {
  const std::vector<std::string> vars{"X", "Y"};
  auto E = [&](const std::string& s) { return parse_expression<Rational>(s, vars); };
  const QPoly diff = E("16(2+X)") - (E("-X^4-Y^4-2X^2Y^2+4X^2") + E("(X^2+Y^2-4)^2") + E("8Y^2") + E("4(X+2)^2"));
  return {"two-disk line at theta=pi", diff.is_zero(), "residual terms " + std::to_string(diff.size())};
}

inline std::vector<Check> sdp_regressions() {
  const std::vector<std::string> XY{"X", "Y"};
  auto E = [&](const std::string& s) { return parse_expression<Rational>(s, XY); };
  const SemialgebraicSet counter(XY, {E("Y"), E("1-Y"), E("Y-X^3"), E("1+X")});
  const SemialgebraicSet disks(XY, {E("-X^4-Y^4-2X^2Y^2+4X^2")});
  const IdealSpec circle(XY, {E("X^2+Y^2-1")});
  std::vector<Check> out;

  const auto in = lasserre_point_member(counter, 1, {1.0 / 3.0, 0.0});
  out.push_back({"L(p)_1 contains (1/3,0)", in.kind == VerdictKind::In, to_string(in.kind)});
  const auto outv = lasserre_point_member(counter, 1, {0.4, 0.0});
  out.push_back({"L(p)_1 excludes (2/5,0)", outv.kind == VerdictKind::Out && outv.margin >= 0.01,
                 std::string(to_string(outv.kind)) + " margin " + format_number(outv.margin)});
  const auto qm = qm_member(counter, 1, E("Y-3X+2"));
  out.push_back({"Y-3X+2 in QM(p)_1", qm.status == Feasibility::Feasible && qm.certificate &&
                                          qm.certificate->replay_residual <= 1e-6,
                 to_string(qm.status)});
  const auto hx = lasserre_support(disks, 2, {1.0, 0.0});
  out.push_back({"two-disk support (1,0) at d=2 is 2",
                 hx.status == SupportResult::Status::Finite && std::abs(hx.value - 2.0) <= 1e-4,
                 format_number(hx.value)});
  const auto hc = theta_support(circle, 1, {1.0, 0.0});
  out.push_back({"circle theta support (1,0) is 1",
                 hc.status == SupportResult::Status::Finite && std::abs(hc.value - 1.0) <= 1e-5,
                 format_number(hc.value)});
  return out;
}

inline Outcome cmd_verify_paper() {
  std::vector<Check> checks{tangent_identity(Rational(1, 2), false), tangent_identity(Rational(1), false),
                            tangent_identity(Rational(3, 4), true), two_disk_family_identity(),
                            two_disk_theta_pi()};
  for (auto& c : sdp_regressions()) {
    checks.push_back(std::move(c));
  }
  Outcome r;
  r.report["checks"] = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    r.report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  r.report["passed"] = all;
  r.code = all ? kTrue : kFalse;
  return r;
}

inline void render_text(const json& report, std::ostream& os) {
  if (report.contains("checks")) {
    for (const auto& c : report["checks"]) {
      os << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " ("
         << c["detail"].get<std::string>() << ")\n";
    }
  }
  for (const auto& [key, value] : report.items()) {
    if (key == "checks") {
      continue;
    }
    os << key << ": ";
    if (value.is_string()) {
      os << value.get<std::string>();
    } else if (value.is_number_float()) {
      os << format_number(value.get<double>());
    } else {
      os << value.dump();
    }
    os << '\n';
  }
}

inline void count_sources(const Options& o) {
  const int sources = !o.set_file.empty() + !o.ideal_file.empty() + !o.pencil_file.empty();
  if (o.command == "verify-paper") {
    require(sources == 0, "verify-paper takes no problem document");
  } else {
    require(sources == 1, "exactly one of --set, --ideal, --pencil is required");
  }
}

}  // namespace detail

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{
      "qm-member",         "lasserre-member",   "lasserre-support", "theta-member",      "theta-support",
      "pushforward-support", "pencil-member",   "projection-member", "polar-member",     "closure-member",
      "pencil-qm-member",  "obstruct-line",     "obstruct-singular", "obstruct-nonexposed", "convex-singular",
      "sample-boundary",   "verify-paper"};
  return names;
}

/// Runs one command. Reports go to `out`, diagnostics to `err`; the
/// return value is the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Convex relaxations, pencils and obstruction checks for semialgebraic sets"};
  app.add_option("command", o.command, "command name")->required();
  app.add_option("--set", o.set_file, "semialgebraic set document");
  app.add_option("--ideal", o.ideal_file, "ideal document");
  app.add_option("--pencil", o.pencil_file, "matrix pencil document");
  app.add_option("--degree", o.degree, "relaxation degree");
  app.add_option("--point", o.point, "comma-separated coordinates");
  app.add_option("--dir", o.dir, "comma-separated direction");
  app.add_option("--witness", o.witness, "second point (nonexposed-face b, convex-singular q)");
  app.add_option("--poly", o.poly, "inline polynomial or polynomial document path");
  app.add_option("--map", o.map, "semicolon-separated pushforward components");
  app.add_option("--tol", o.tol, "decision tolerance");
  app.add_option("--box", o.box, "bounding box half-width");
  app.add_option("--out", o.out, "certificate or CSV output path");
  app.add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--mode", o.mode, "coefficient mode")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--dirs", o.dirs, "number of directions for sample-boundary");
  app.add_flag("--real-radical", o.real_radical, "assert that the generators span a real radical ideal");

  std::vector<std::string> argv_store{"specshadow"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) {
    argv.push_back(s.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  const std::map<std::string, std::function<Outcome()>> table{
      {"qm-member", [&] { return detail::cmd_qm_member(o); }},
      {"lasserre-member", [&] { return detail::cmd_lasserre_member(o); }},
      {"lasserre-support", [&] { return detail::cmd_lasserre_support(o); }},
      {"theta-member", [&] { return detail::cmd_theta_member(o); }},
      {"theta-support", [&] { return detail::cmd_theta_support(o); }},
      {"pushforward-support", [&] { return detail::cmd_pushforward_support(o); }},
      {"pencil-member", [&] { return detail::cmd_pencil_member(o); }},
      {"projection-member", [&] { return detail::cmd_projection_member(o); }},
      {"polar-member", [&] { return detail::cmd_polar_member(o); }},
      {"closure-member", [&] { return detail::cmd_closure_member(o); }},
      {"pencil-qm-member", [&] { return detail::cmd_pencil_qm_member(o); }},
      {"obstruct-line", [&] { return detail::cmd_obstruct(o); }},
      {"obstruct-singular", [&] { return detail::cmd_obstruct(o); }},
      {"obstruct-nonexposed", [&] { return detail::cmd_obstruct(o); }},
      {"convex-singular", [&] { return detail::cmd_obstruct(o); }},
      {"verify-paper", [&] { return detail::cmd_verify_paper(); }},
  };

  Outcome result;
  try {
    if (o.command == "sample-boundary") {
      detail::count_sources(o);
      require(o.pencil_file.empty(), "sample-boundary needs --set or --ideal");
      if (o.out.empty()) {
        result = detail::cmd_sample_boundary(o, out);
      } else {
        std::ofstream f(o.out);
        require(f.good(), "cannot write '" + o.out + "'");
        result = detail::cmd_sample_boundary(o, f);
        result.report["csv_file"] = o.out;
      }
      detail::render_text(result.report, err);
      return result.code;
    }
    const auto it = table.find(o.command);
    if (it == table.end()) {
      std::string known;
      for (const auto& c : commands()) {
        known += (known.empty() ? "" : ", ") + c;
      }
      throw InputError("unknown command '" + o.command + "' (known: " + known + ")");
    }
    detail::count_sources(o);
    result = it->second();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kInaccurate;
  }

  result.report["command"] = o.command;
  result.report["exit_code"] = result.code;
  if (o.format == "json") {
    out << result.report.dump(2) << '\n';
  } else {
    detail::render_text(result.report, out);
  }
  return result.code;
}

}  // namespace specshadow::cli

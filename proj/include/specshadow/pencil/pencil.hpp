#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "specshadow/error.hpp"
#include "specshadow/poly/io.hpp"
#include "specshadow/poly/scalar.hpp"
#include "specshadow/sdp/sym_matrix.hpp"

namespace specshadow {

using RatMatrix = std::vector<std::vector<Rational>>;

/// A(X,Y) = A + Σ X_i B_i + Σ Y_j C_j with k×k symmetric rational
/// coefficients. The X variables are the visible coordinates, the Y
/// variables are projected away. Double copies of every matrix are kept
/// for the solver.
class MatrixPencil {
 public:
  MatrixPencil() = default;

  MatrixPencil(RatMatrix A, std::vector<RatMatrix> B, std::vector<RatMatrix> C,
               std::vector<std::string> xvars = {}, std::vector<std::string> yvars = {})
      : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), xvars_(std::move(xvars)), yvars_(std::move(yvars)) {
    k_ = static_cast<int>(A_.size());
    require(k_ >= 1, "pencil matrices must be at least 1x1");
    check_symmetric(A_, "A");
    for (std::size_t i = 0; i < B_.size(); ++i) {
      check_symmetric(B_[i], "B[" + std::to_string(i) + "]");
    }
    for (std::size_t j = 0; j < C_.size(); ++j) {
      check_symmetric(C_[j], "C[" + std::to_string(j) + "]");
    }
    if (xvars_.empty()) {
      xvars_ = default_names("X", B_.size());
    }
    if (yvars_.empty()) {
      yvars_ = default_names("Y", C_.size());
    }
    require(xvars_.size() == B_.size(), "number of X names must equal the number of B matrices");
    require(yvars_.size() == C_.size(), "number of Y names must equal the number of C matrices");
    Af_ = to_sym(A_);
    for (const auto& m : B_) {
      Bf_.push_back(to_sym(m));
    }
    for (const auto& m : C_) {
      Cf_.push_back(to_sym(m));
    }
  }

  int k() const { return k_; }
  int nx() const { return static_cast<int>(B_.size()); }
  int ny() const { return static_cast<int>(C_.size()); }

  const RatMatrix& A_exact() const { return A_; }
  const RatMatrix& B_exact(int i) const { return B_.at(static_cast<std::size_t>(i)); }
  const RatMatrix& C_exact(int j) const { return C_.at(static_cast<std::size_t>(j)); }
  const SymMatrix& A() const { return Af_; }
  const SymMatrix& B(int i) const { return Bf_.at(static_cast<std::size_t>(i)); }
  const SymMatrix& C(int j) const { return Cf_.at(static_cast<std::size_t>(j)); }
  const std::vector<std::string>& xvars() const { return xvars_; }
  const std::vector<std::string>& yvars() const { return yvars_; }

  /// A(x,y) for a point with nx + ny coordinates.
  SymMatrix evaluate(const std::vector<double>& xy) const {
    require(static_cast<int>(xy.size()) == nx() + ny(), "point must have nx + ny coordinates");
    Eigen::MatrixXd m = Af_.matrix();
    for (int i = 0; i < nx(); ++i) {
      m += xy[static_cast<std::size_t>(i)] * Bf_[static_cast<std::size_t>(i)].matrix();
    }
    for (int j = 0; j < ny(); ++j) {
      m += xy[static_cast<std::size_t>(nx() + j)] * Cf_[static_cast<std::size_t>(j)].matrix();
    }
    return SymMatrix(m);
  }

  /// A'(x) = A(x, 0).
  SymMatrix restricted(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == nx(), "point must have nx coordinates");
    Eigen::MatrixXd m = Af_.matrix();
    for (int i = 0; i < nx(); ++i) {
      m += x[static_cast<std::size_t>(i)] * Bf_[static_cast<std::size_t>(i)].matrix();
    }
    return SymMatrix(m);
  }

 private:
  void check_symmetric(const RatMatrix& m, const std::string& name) const {
    require(static_cast<int>(m.size()) == k_, name + " has the wrong number of rows");
    for (const auto& row : m) {
      require(static_cast<int>(row.size()) == k_, name + " is not square");
    }
    for (int a = 0; a < k_; ++a) {
      for (int b = 0; b < a; ++b) {
        require(m[a][b] == m[b][a], name + " is not symmetric");
      }
    }
  }

  static SymMatrix to_sym(const RatMatrix& m) {
    const auto k = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd d(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        d(a, b) = to_double(m[a][b]);
      }
    }
    return SymMatrix(d);
  }

  static std::vector<std::string> default_names(const std::string& stem, std::size_t n) {
    if (n == 1) {
      return {stem};
    }
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) {
      out.push_back(stem + std::to_string(i));
    }
    return out;
  }

  int k_ = 0;
  RatMatrix A_;
  std::vector<RatMatrix> B_, C_;
  std::vector<std::string> xvars_, yvars_;
  SymMatrix Af_;
  std::vector<SymMatrix> Bf_, Cf_;
};

namespace detail {

inline RatMatrix rat_matrix_from_json(const json& rows, int k, const std::string& name) {
  require(rows.is_array() && static_cast<int>(rows.size()) == k, name + " must have k rows");
  RatMatrix m;
  for (const auto& row : rows) {
    require(row.is_array() && static_cast<int>(row.size()) == k, name + " must have k columns");
    std::vector<Rational> r;
    for (const auto& e : row) {
      r.push_back(parse_rational(coefficient_string(e)));
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline std::vector<RatMatrix> rat_matrix_list(const json& doc, const char* key, int count, int k) {
  std::vector<RatMatrix> out;
  if (count == 0 && !doc.contains(key)) {
    return out;
  }
  require(doc.contains(key) && doc[key].is_array() && static_cast<int>(doc[key].size()) == count,
          std::string("\"") + key + "\" must list exactly as many matrices as declared");
  for (int i = 0; i < count; ++i) {
    out.push_back(rat_matrix_from_json(doc[key][static_cast<std::size_t>(i)], k,
                                       std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline json rat_matrix_to_json(const RatMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& e : row) {
      r.push_back(to_string(e));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

/// Reads {"k":4,"nx":2,"ny":1,"A":[[...]],"B":[...],"C":[...]} with
/// coefficient strings. Optional "vars" and "yvars" name the variables.
inline MatrixPencil pencil_from_json(const json& doc) {
  require(doc.is_object(), "pencil document must be an object");
  for (const char* key : {"k", "nx", "ny"}) {
    require(doc.contains(key) && doc[key].is_number_integer() && doc[key].get<long long>() >= 0,
            std::string("pencil document needs a nonnegative integer \"") + key + "\"");
  }
  const int k = doc["k"].get<int>();
  const int nx = doc["nx"].get<int>();
  const int ny = doc["ny"].get<int>();
  require(k >= 1, "k must be positive");
  require(doc.contains("A"), "pencil document needs \"A\"");
  RatMatrix A = detail::rat_matrix_from_json(doc["A"], k, "A");
  auto B = detail::rat_matrix_list(doc, "B", nx, k);
  auto C = detail::rat_matrix_list(doc, "C", ny, k);
  std::vector<std::string> xv, yv;
  if (doc.contains("vars")) {
    xv = parse_vars(doc);
  }
  if (doc.contains("yvars")) {
    yv = parse_vars(json{{"vars", doc["yvars"]}});
  }
  return MatrixPencil(std::move(A), std::move(B), std::move(C), std::move(xv), std::move(yv));
}

inline json pencil_to_json(const MatrixPencil& P) {
  json doc;
  doc["k"] = P.k();
  doc["nx"] = P.nx();
  doc["ny"] = P.ny();
  doc["vars"] = P.xvars();
  doc["yvars"] = P.yvars();
  doc["A"] = detail::rat_matrix_to_json(P.A_exact());
  doc["B"] = json::array();
  for (int i = 0; i < P.nx(); ++i) {
    doc["B"].push_back(detail::rat_matrix_to_json(P.B_exact(i)));
  }
  doc["C"] = json::array();
  for (int j = 0; j < P.ny(); ++j) {
    doc["C"].push_back(detail::rat_matrix_to_json(P.C_exact(j)));
  }
  return doc;
}

}  // namespace specshadow

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "specshadow/error.hpp"

namespace specshadow {

/// Dense real symmetric matrix. Construction from an arbitrary square
/// matrix symmetrizes it, so entry(i,j) == entry(j,i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Eigen::Index k) : m_(Eigen::MatrixXd::Zero(k, k)) {}

  explicit SymMatrix(const Eigen::MatrixXd& m) {
    require(m.rows() == m.cols(), "symmetric matrix must be square");
    m_ = 0.5 * (m + m.transpose());
  }

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(k, k);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      require(static_cast<Eigen::Index>(row.size()) == k, "symmetric matrix must be square");
      Eigen::Index j = 0;
      for (double v : row) {
        m(i, j++) = v;
      }
      ++i;
    }
    m_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix identity(Eigen::Index k) {
    SymMatrix s(k);
    s.m_.setIdentity();
    return s;
  }

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  void set(Eigen::Index i, Eigen::Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& matrix() const { return m_; }

  /// Frobenius inner product A∘B = Tr(AB).
  double inner(const SymMatrix& other) const {
    require(dim() == other.dim(), "inner product dimension mismatch");
    return m_.cwiseProduct(other.m_).sum();
  }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(Eigen::MatrixXd(m_ + o.m_)); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(Eigen::MatrixXd(m_ - o.m_)); }
  SymMatrix operator*(double s) const { return SymMatrix(Eigen::MatrixXd(m_ * s)); }

  bool operator==(const SymMatrix& o) const { return m_ == o.m_; }

 private:
  Eigen::MatrixXd m_;
};

inline Eigen::Index svec_length(Eigen::Index k) { return k * (k + 1) / 2; }

/// Lower triangle, column by column, off-diagonals scaled by sqrt(2) so
/// that svec(A)·svec(B) = A∘B.
inline Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const Eigen::Index k = m.rows();
  Eigen::VectorXd v(svec_length(k));
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    v(p++) = m(j, j);
    for (Eigen::Index i = j + 1; i < k; ++i) {
      v(p++) = M_SQRT2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
  return v;
}

inline Eigen::VectorXd svec(const SymMatrix& m) { return svec(m.matrix()); }

inline SymMatrix smat(const Eigen::VectorXd& v) {
  const auto len = v.size();
  const auto k = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  require(svec_length(k) == len, "svec length is not a triangular number");
  Eigen::MatrixXd m(k, k);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    m(j, j) = v(p++);
    for (Eigen::Index i = j + 1; i < k; ++i) {
      m(i, j) = v(p++) / M_SQRT2;
      m(j, i) = m(i, j);
    }
  }
  return SymMatrix(m);
}

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Smallest eigenvalue and a unit eigenvector.
inline EigenPair eigmin(const SymMatrix& m) {
  require(m.dim() > 0, "eigmin of an empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix());
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) {
    return 0.0;
  }
  if (m.rows() == 1) {
    return m(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) {
    return 0.0;
  }
  if (m.rows() == 1) {
    return m(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

}  // namespace specshadow

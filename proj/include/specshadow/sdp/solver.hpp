#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specshadow/sdp/problem.hpp"
#include "specshadow/sdp/sym_matrix.hpp"

namespace specshadow {

namespace detail {

/// Dense copy of a problem in the form the interior-point core works on.
struct DenseSDP {
  std::vector<int> dims;
  int nf = 0;
  int m = 0;
  std::vector<std::vector<Eigen::MatrixXd>> A;  // A[row][block]
  std::vector<std::vector<char>> nz;            // nz[row][block]
  Eigen::MatrixXd F;                            // m x nf
  Eigen::VectorXd b;
  std::vector<Eigen::MatrixXd> C;
  Eigen::VectorXd c;

  int total_dim() const {
    int n = 0;
    for (int d : dims) {
      n += d;
    }
    return n;
  }
};

struct IpmResult {
  bool converged = false;
  bool diverged = false;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double pobj = 0.0;
  double dobj = 0.0;
  double pinf = 0.0;
  double dinf = 0.0;
  double gap = 0.0;
  int iterations = 0;
  // Objective and primal residual of the last iterate (not the best one),
  // used to recognise divergence to -infinity.
  double last_pobj = 0.0;
  double last_pinf = 0.0;
};

inline double frob2(const Eigen::MatrixXd& m) { return m.squaredNorm(); }

/// Largest step a <= 1 with M + a*D ⪰ 0 given the Cholesky factor of M,
/// or +inf when D keeps M PSD for every a >= 0.
inline double max_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& D) {
  const Eigen::MatrixXd L = chol.matrixL();
  Eigen::MatrixXd Q = L.triangularView<Eigen::Lower>().solve(D);
  Q = L.triangularView<Eigen::Lower>().solve(Q.transpose().eval());
  Q = 0.5 * (Q + Q.transpose()).eval();
  const double lmin = min_eigenvalue(Q);
  if (lmin >= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return -1.0 / lmin;
}

/// Infeasible primal-dual path-following with Nesterov–Todd scaling and
/// Mehrotra predictor-corrector steps. Free variables enter the
/// augmented (Schur + free columns) system directly.
inline IpmResult run_ipm(const DenseSDP& p, const SolverSettings& s) {
  const int nb = static_cast<int>(p.dims.size());
  const int m = p.m;
  const int nf = p.nf;
  const int n_total = std::max(1, p.total_dim());

  std::vector<Eigen::MatrixXd> X(nb), Z(nb);
  double normC2 = p.c.squaredNorm();
  for (int b = 0; b < nb; ++b) {
    const int k = p.dims[b];
    double a_max = 0.0;
    double xi_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (!p.nz[i][b]) {
        continue;
      }
      const double an = p.A[i][b].norm();
      a_max = std::max(a_max, an);
      xi_ratio = std::max(xi_ratio, (1.0 + std::abs(p.b(i))) / (1.0 + an));
    }
    const double cn = p.C[b].norm();
    normC2 += cn * cn;
    const double xi = std::max({10.0, std::sqrt(static_cast<double>(k)), k * xi_ratio});
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(k)), cn, a_max});
    X[b] = xi * Eigen::MatrixXd::Identity(k, k);
    Z[b] = eta * Eigen::MatrixXd::Identity(k, k);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  const double normb = p.b.norm();
  const double normC = std::sqrt(normC2);

  IpmResult best;
  double best_merit = std::numeric_limits<double>::infinity();
  int stalls = 0;

  auto apply_A = [&](const std::vector<Eigen::MatrixXd>& Xs) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      for (int b = 0; b < nb; ++b) {
        if (p.nz[i][b]) {
          v(i) += p.A[i][b].cwiseProduct(Xs[b]).sum();
        }
      }
    }
    return v;
  };
  auto apply_At = [&](const Eigen::VectorXd& yy, int b) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p.dims[b], p.dims[b]);
    for (int i = 0; i < m; ++i) {
      if (p.nz[i][b] && yy(i) != 0.0) {
        out.noalias() += yy(i) * p.A[i][b];
      }
    }
    return out;
  };

  for (int iter = 0; iter <= s.max_iterations; ++iter) {
    // Residuals and progress measures.
    const Eigen::VectorXd AX = apply_A(X);
    const Eigen::VectorXd rp = p.b - AX - (nf > 0 ? Eigen::VectorXd(p.F * x) : Eigen::VectorXd::Zero(m));
    std::vector<Eigen::MatrixXd> Rd(nb);
    double rd2 = 0.0;
    double pobj = p.c.dot(x);
    double xz = 0.0;
    for (int b = 0; b < nb; ++b) {
      Rd[b] = p.C[b] - Z[b] - apply_At(y, b);
      rd2 += frob2(Rd[b]);
      pobj += p.C[b].cwiseProduct(X[b]).sum();
      xz += X[b].cwiseProduct(Z[b]).sum();
    }
    const Eigen::VectorXd rf = p.c - (nf > 0 ? Eigen::VectorXd(p.F.transpose() * y) : Eigen::VectorXd::Zero(0));
    rd2 += rf.squaredNorm();
    const double dobj = p.b.dot(y);
    const double mu = xz / n_total;
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double gap = std::max(std::abs(pobj - dobj), std::abs(xz)) / denom;
    const double pinf = rp.norm() / (1.0 + normb);
    const double dinf = std::sqrt(rd2) / (1.0 + normC);

    if (s.verbose) {
      std::fprintf(stderr, "ipm %3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", iter,
                   pobj, dobj, gap, pinf, dinf, mu);
    }
    best.last_pobj = pobj;
    best.last_pinf = pinf;
    const double merit = std::max({gap / s.gap_tol, pinf / s.feas_tol, dinf / s.feas_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best.X = X;
      best.Z = Z;
      best.x = x;
      best.y = y;
      best.pobj = pobj;
      best.dobj = dobj;
      best.pinf = pinf;
      best.dinf = dinf;
      best.gap = gap;
      best.iterations = iter;
    }
    if (gap <= s.gap_tol && pinf <= s.feas_tol && dinf <= s.feas_tol) {
      best.converged = true;
      return best;
    }
    if (iter == s.max_iterations) {
      break;
    }
    double big = y.lpNorm<Eigen::Infinity>();
    for (int b = 0; b < nb; ++b) {
      big = std::max({big, X[b].lpNorm<Eigen::Infinity>(), Z[b].lpNorm<Eigen::Infinity>()});
    }
    if (nf > 0) {
      big = std::max(big, x.lpNorm<Eigen::Infinity>());
    }
    if (big > 1e13) {
      best.diverged = true;
      break;
    }

    // Nesterov–Todd scaling per block: W = G G^T with G^T Z G = G^{-1} X G^{-T} = V.
    std::vector<Eigen::MatrixXd> G(nb), Ginv(nb), W(nb);
    std::vector<Eigen::VectorXd> d(nb);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> cholX(nb), cholZ(nb);
    bool ok = true;
    for (int b = 0; b < nb && ok; ++b) {
      cholX[b].compute(X[b]);
      cholZ[b].compute(Z[b]);
      if (cholX[b].info() != Eigen::Success || cholZ[b].info() != Eigen::Success) {
        ok = false;
        break;
      }
      const Eigen::MatrixXd L = cholX[b].matrixL();
      const Eigen::MatrixXd T = L.transpose() * Z[b] * L;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
      Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-300);
      d[b] = lam.cwiseSqrt();
      const Eigen::VectorXd dmh = d[b].cwiseSqrt().cwiseInverse();
      G[b] = L * es.eigenvectors() * dmh.asDiagonal();
      const Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(
          Eigen::MatrixXd::Identity(p.dims[b], p.dims[b]));
      Ginv[b] = d[b].cwiseSqrt().asDiagonal() * es.eigenvectors().transpose() * Linv;
      W[b] = G[b] * G[b].transpose();
    }
    if (!ok) {
      break;
    }

    // Schur complement M_ij = sum_b A_ib ∘ (W A_jb W).
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      for (int j = 0; j < m; ++j) {
        if (!p.nz[j][b]) {
          continue;
        }
        const Eigen::MatrixXd T = W[b] * p.A[j][b] * W[b];
        for (int i = 0; i <= j; ++i) {
          if (p.nz[i][b]) {
            M(i, j) += p.A[i][b].cwiseProduct(T).sum();
          }
        }
      }
    }
    M.triangularView<Eigen::StrictlyLower>() = M.transpose().triangularView<Eigen::StrictlyLower>();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + nf, m + nf);
    K.topLeftCorner(m, m) = M;
    if (nf > 0) {
      K.topRightCorner(m, nf) = p.F;
      K.bottomLeftCorner(nf, m) = p.F.transpose();
    }
    const double reg = 1e-15 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    K.topLeftCorner(m, m).diagonal().array() += reg;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    std::vector<Eigen::MatrixXd> WRdW(nb);
    for (int b = 0; b < nb; ++b) {
      WRdW[b] = W[b] * Rd[b] * W[b];
    }

    // Solves for the direction whose complementarity row in the scaled
    // space is  V S + S V = Rv.
    auto direction = [&](const std::vector<Eigen::MatrixXd>& Rv, std::vector<Eigen::MatrixXd>& dX,
                         std::vector<Eigen::MatrixXd>& dZ, Eigen::VectorXd& dy, Eigen::VectorXd& dx) {
      std::vector<Eigen::MatrixXd> R(nb);
      Eigen::VectorXd rhs(m + nf);
      rhs.head(m) = rp;
      for (int b = 0; b < nb; ++b) {
        const int k = p.dims[b];
        Eigen::MatrixXd S(k, k);
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) {
            S(i, j) = Rv[b](i, j) / (d[b](i) + d[b](j));
          }
        }
        R[b] = G[b] * S * G[b].transpose();
        const Eigen::MatrixXd T = R[b] - WRdW[b];
        for (int i = 0; i < m; ++i) {
          if (p.nz[i][b]) {
            rhs(i) -= p.A[i][b].cwiseProduct(T).sum();
          }
        }
      }
      if (nf > 0) {
        rhs.tail(nf) = rf;
      }
      Eigen::VectorXd sol = lu.solve(rhs);
      sol += lu.solve(Eigen::VectorXd(rhs - K * sol));
      dy = sol.head(m);
      dx = sol.tail(nf);
      dX.resize(nb);
      dZ.resize(nb);
      for (int b = 0; b < nb; ++b) {
        dZ[b] = Rd[b] - apply_At(dy, b);
        Eigen::MatrixXd t = R[b] - W[b] * dZ[b] * W[b];
        dX[b] = 0.5 * (t + t.transpose());
      }
      // Refine against the primal equation itself: a correction dy' moves
      // dX by W A^T(dy') W and dZ by -A^T(dy'), which keeps the dual and
      // complementarity rows intact while fixing A(dX) + F dx = rp.
      for (int round = 0; round < 2; ++round) {
        Eigen::VectorXd r = rp - apply_A(dX);
        if (nf > 0) {
          r -= p.F * dx;
        }
        Eigen::VectorXd rr = Eigen::VectorXd::Zero(m + nf);
        rr.head(m) = r;
        if (nf > 0) {
          rr.tail(nf) = rf - p.F.transpose() * dy;
        }
        Eigen::VectorXd corr = lu.solve(rr);
        corr += lu.solve(Eigen::VectorXd(rr - K * corr));
        dy += corr.head(m);
        dx += corr.tail(nf);
        for (int b = 0; b < nb; ++b) {
          const Eigen::MatrixXd aty = apply_At(corr.head(m), b);
          dZ[b] -= aty;
          Eigen::MatrixXd t = W[b] * aty * W[b];
          dX[b] += 0.5 * (t + t.transpose());
        }
      }
    };

    auto step_lengths = [&](const std::vector<Eigen::MatrixXd>& dX, const std::vector<Eigen::MatrixXd>& dZ) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(cholX[b], dX[b]));
        ad = std::min(ad, max_step(cholZ[b], dZ[b]));
      }
      return std::pair<double, double>(ap, ad);
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> Rv(nb);
    for (int b = 0; b < nb; ++b) {
      Rv[b] = Eigen::MatrixXd(-2.0 * d[b].cwiseAbs2().asDiagonal());
    }
    std::vector<Eigen::MatrixXd> dXa, dZa;
    Eigen::VectorXd dya, dxa;
    direction(Rv, dXa, dZa, dya, dxa);
    auto [apa, ada] = step_lengths(dXa, dZa);
    apa = std::min(1.0, apa);
    ada = std::min(1.0, ada);
    double xz_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      xz_aff += (X[b] + apa * dXa[b]).cwiseProduct(Z[b] + ada * dZa[b]).sum();
    }
    const double mu_aff = xz_aff / n_total;
    double sigma = mu > 0 ? std::pow(std::max(0.0, mu_aff) / mu, 3.0) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (int b = 0; b < nb; ++b) {
      const int k = p.dims[b];
      const Eigen::MatrixXd dXt = Ginv[b] * dXa[b] * Ginv[b].transpose();
      const Eigen::MatrixXd dZt = G[b].transpose() * dZa[b] * G[b];
      Rv[b] = 2.0 * sigma * mu * Eigen::MatrixXd::Identity(k, k) -
              Eigen::MatrixXd(2.0 * d[b].cwiseAbs2().asDiagonal()) - (dXt * dZt + dZt * dXt);
    }
    std::vector<Eigen::MatrixXd> dX, dZ;
    Eigen::VectorXd dy, dx;
    direction(Rv, dX, dZ, dy, dx);
    auto [ap, ad] = step_lengths(dX, dZ);
    const double tau = 0.98;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    if (s.verbose) {
      std::fprintf(stderr, "    sigma %.2e step %.3e %.3e\n", sigma, ap, ad);
    }
    if (std::max(ap, ad) < 1e-10) {
      if (++stalls >= 3) {
        break;
      }
    } else {
      stalls = 0;
    }
    for (int b = 0; b < nb; ++b) {
      X[b] += ap * dX[b];
      Z[b] += ad * dZ[b];
      X[b] = 0.5 * (X[b] + X[b].transpose()).eval();
      Z[b] = 0.5 * (Z[b] + Z[b].transpose()).eval();
    }
    if (nf > 0) {
      x += ap * dx;
    }
    y += ad * dy;
  }
  return best;
}

/// Rows/columns surviving rank reduction, with the scale applied to each
/// kept row.
struct Reduction {
  DenseSDP sdp;
  std::vector<int> kept_rows;
  std::vector<double> row_norms;  // per kept row
  std::vector<int> kept_free;
  bool inconsistent = false;
  Eigen::VectorXd farkas;  // full-length, when inconsistent
  bool free_direction_unbounded = false;
  std::vector<std::string> warnings;
  /// Facial reduction: reduced block -> original block, and the original
  /// indices each reduced block keeps.
  std::vector<int> block_of;
  std::vector<std::vector<int>> kept_index;
  std::vector<int> facial_rows;
};

inline Eigen::MatrixXd restrict_block(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index c = 0; c < k; ++c) {
      out(a, c) = m(idx[a], idx[c]);
    }
  }
  return out;
}

/// Repeatedly finds rows  sum_k a_k X_b(k,k) = 0  whose entries on the
/// remaining face are all diagonal and of one sign. Such a row forces
/// those diagonal entries, and hence their rows and columns, to vanish.
/// Returns the rows used, in order; `keep` holds the surviving indices.
inline std::vector<int> facial_reduction(const std::vector<std::vector<Eigen::MatrixXd>>& A, const Eigen::MatrixXd& F,
                                         const Eigen::VectorXd& b, std::vector<std::vector<char>>& keep) {
  std::vector<int> used;
  const int m = static_cast<int>(A.size());
  const int nb = static_cast<int>(keep.size());
  std::vector<char> done(m, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < m; ++i) {
      if (done[i] || b(i) != 0.0 || (F.cols() > 0 && F.row(i).cwiseAbs().maxCoeff() != 0.0)) {
        continue;
      }
      int sign = 0;
      bool diagonal_only = true;
      bool any = false;
      for (int blk = 0; blk < nb && diagonal_only; ++blk) {
        const auto& a = A[i][blk];
        for (Eigen::Index r = 0; r < a.rows() && diagonal_only; ++r) {
          if (!keep[blk][r]) {
            continue;
          }
          for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (!keep[blk][c] || a(r, c) == 0.0) {
              continue;
            }
            if (r != c) {
              diagonal_only = false;
              break;
            }
            const int sg = a(r, c) > 0 ? 1 : -1;
            if (sign != 0 && sg != sign) {
              diagonal_only = false;
              break;
            }
            sign = sg;
            any = true;
          }
        }
      }
      if (!diagonal_only || !any) {
        continue;
      }
      for (int blk = 0; blk < nb; ++blk) {
        for (Eigen::Index r = 0; r < A[i][blk].rows(); ++r) {
          if (keep[blk][r] && A[i][blk](r, r) != 0.0) {
            keep[blk][r] = 0;
          }
        }
      }
      done[i] = 1;
      used.push_back(i);
      changed = true;
    }
  }
  return used;
}

inline Reduction reduce_problem(const SDPProblem& prob) {
  Reduction red;
  const auto& dims = prob.blocks();
  const int nb = static_cast<int>(dims.size());
  const int m_full = prob.n_constraints();
  const int nf_full = prob.n_free();

  std::vector<std::vector<Eigen::MatrixXd>> A(m_full, std::vector<Eigen::MatrixXd>(nb));
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m_full, nf_full);
  Eigen::VectorXd b(m_full);
  Eigen::VectorXd norms(m_full);
  for (int i = 0; i < m_full; ++i) {
    const auto& con = prob.constraints()[static_cast<std::size_t>(i)];
    double n2 = 0.0;
    for (int blk = 0; blk < nb; ++blk) {
      A[i][blk] = prob.dense_block(con.lhs, blk);
      n2 += A[i][blk].squaredNorm();
    }
    if (nf_full > 0) {
      F.row(i) = prob.dense_free(con.lhs).transpose();
      n2 += F.row(i).squaredNorm();
    }
    b(i) = con.rhs;
    norms(i) = std::sqrt(n2);
  }
  red.farkas = Eigen::VectorXd::Zero(m_full);

  std::vector<std::vector<char>> keep(nb);
  for (int blk = 0; blk < nb; ++blk) {
    keep[blk].assign(static_cast<std::size_t>(dims[blk]), 1);
  }
  red.facial_rows = facial_reduction(A, F, b, keep);
  std::vector<int> dims_r;
  for (int blk = 0; blk < nb; ++blk) {
    std::vector<int> idx;
    for (int k = 0; k < dims[blk]; ++k) {
      if (keep[blk][k]) {
        idx.push_back(k);
      }
    }
    if (!idx.empty()) {
      red.block_of.push_back(blk);
      dims_r.push_back(static_cast<int>(idx.size()));
      red.kept_index.push_back(std::move(idx));
    }
  }
  if (!red.facial_rows.empty()) {
    int removed = 0;
    for (int blk = 0; blk < nb; ++blk) {
      for (char k : keep[blk]) {
        removed += k ? 0 : 1;
      }
    }
    red.warnings.push_back("facial reduction removed " + std::to_string(removed) +
                           " Gram index(es) forced to zero");
  }
  const int nb_r = static_cast<int>(dims_r.size());
  for (int i = 0; i < m_full; ++i) {
    std::vector<Eigen::MatrixXd> row;
    double n2 = F.cols() > 0 ? F.row(i).squaredNorm() : 0.0;
    for (int r = 0; r < nb_r; ++r) {
      row.push_back(restrict_block(A[i][red.block_of[r]], red.kept_index[r]));
      n2 += row.back().squaredNorm();
    }
    A[i] = std::move(row);
    norms(i) = std::sqrt(n2);
  }

  // Zero rows.
  std::vector<int> candidates;
  for (int i = 0; i < m_full; ++i) {
    if (norms(i) == 0.0) {
      if (std::abs(b(i)) > 1e-12) {
        red.inconsistent = true;
        red.farkas.setZero();
        red.farkas(i) = -1.0 / b(i);
        return red;
      }
      continue;
    }
    candidates.push_back(i);
  }

  // Redundant free columns: drop a maximal dependent set.
  std::vector<int> kept_free;
  Eigen::VectorXd c_full = prob.dense_free(prob.objective());
  if (nf_full > 0) {
    Eigen::MatrixXd Fn(m_full, nf_full);
    for (int i = 0; i < m_full; ++i) {
      Fn.row(i) = norms(i) > 0 ? Eigen::RowVectorXd(F.row(i) / norms(i)) : Eigen::RowVectorXd(F.row(i));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Fn);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    for (int k = 0; k < rank; ++k) {
      kept_free.push_back(static_cast<int>(qr.colsPermutation().indices()(k)));
    }
    std::sort(kept_free.begin(), kept_free.end());
    if (rank < nf_full) {
      red.warnings.push_back("dropped " + std::to_string(nf_full - rank) +
                             " linearly dependent free variable(s)");
      Eigen::MatrixXd FK(m_full, rank);
      Eigen::VectorXd cK(rank);
      for (int k = 0; k < rank; ++k) {
        FK.col(k) = Fn.col(kept_free[k]);
        cK(k) = c_full(kept_free[k]);
      }
      auto qrK = FK.colPivHouseholderQr();
      for (int j = 0; j < nf_full; ++j) {
        if (std::find(kept_free.begin(), kept_free.end(), j) != kept_free.end()) {
          continue;
        }
        const Eigen::VectorXd alpha = rank > 0 ? Eigen::VectorXd(qrK.solve(Fn.col(j))) : Eigen::VectorXd();
        const double cj = c_full(j) - (rank > 0 ? cK.dot(alpha) : 0.0);
        if (std::abs(cj) > 1e-9 * (1.0 + c_full.norm())) {
          red.free_direction_unbounded = true;
        }
      }
    }
  }
  const int nf = static_cast<int>(kept_free.size());

  // Redundant rows.
  int svec_total = 0;
  for (int d : dims_r) {
    svec_total += static_cast<int>(svec_length(d));
  }
  const int mc = static_cast<int>(candidates.size());
  Eigen::MatrixXd RT(svec_total + nf, mc);
  Eigen::VectorXd bn(mc);
  for (int r = 0; r < mc; ++r) {
    const int i = candidates[r];
    int off = 0;
    for (int blk = 0; blk < nb_r; ++blk) {
      const auto len = svec_length(dims_r[blk]);
      RT.col(r).segment(off, len) = svec(A[i][blk]) / norms(i);
      off += static_cast<int>(len);
    }
    for (int k = 0; k < nf; ++k) {
      RT(off + k, r) = F(i, kept_free[k]) / norms(i);
    }
    bn(r) = b(i) / norms(i);
  }
  std::vector<int> kept_local;
  if (mc > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(RT);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    for (int k = 0; k < rank; ++k) {
      kept_local.push_back(static_cast<int>(qr.colsPermutation().indices()(k)));
    }
    std::sort(kept_local.begin(), kept_local.end());
    if (rank < mc) {
      red.warnings.push_back("dropped " + std::to_string(mc - rank) +
                             " linearly dependent constraint(s)");
      Eigen::MatrixXd RK(RT.rows(), rank);
      Eigen::VectorXd bK(rank);
      for (int k = 0; k < rank; ++k) {
        RK.col(k) = RT.col(kept_local[k]);
        bK(k) = bn(kept_local[k]);
      }
      auto qrK = RK.colPivHouseholderQr();
      for (int r = 0; r < mc; ++r) {
        if (std::binary_search(kept_local.begin(), kept_local.end(), r)) {
          continue;
        }
        const Eigen::VectorXd beta = qrK.solve(RT.col(r));
        const double mismatch = bn(r) - bK.dot(beta);
        if (std::abs(mismatch) > 1e-9 * (1.0 + bn.lpNorm<Eigen::Infinity>())) {
          // sum_i yhat_i Ahat_i = 0 with bhat·yhat = mismatch.
          red.inconsistent = true;
          red.farkas.setZero();
          red.farkas(candidates[r]) = 1.0 / norms(candidates[r]);
          for (int k = 0; k < rank; ++k) {
            const int i = candidates[kept_local[k]];
            red.farkas(i) = -beta(k) / norms(i);
          }
          red.farkas *= -1.0 / mismatch;
          return red;
        }
      }
    }
  }

  DenseSDP& s = red.sdp;
  s.dims = dims_r;
  s.nf = nf;
  s.m = static_cast<int>(kept_local.size());
  s.A.resize(s.m);
  s.nz.resize(s.m);
  s.F = Eigen::MatrixXd::Zero(s.m, nf);
  s.b.resize(s.m);
  for (int r = 0; r < s.m; ++r) {
    const int i = candidates[kept_local[r]];
    red.kept_rows.push_back(i);
    red.row_norms.push_back(norms(i));
    s.A[r].resize(nb_r);
    s.nz[r].resize(nb_r);
    for (int blk = 0; blk < nb_r; ++blk) {
      s.A[r][blk] = A[i][blk] / norms(i);
      s.nz[r][blk] = s.A[r][blk].cwiseAbs().maxCoeff() > 0.0 ? 1 : 0;
    }
    for (int k = 0; k < nf; ++k) {
      s.F(r, k) = F(i, kept_free[k]) / norms(i);
    }
    s.b(r) = b(i) / norms(i);
  }
  s.C.resize(nb_r);
  for (int blk = 0; blk < nb_r; ++blk) {
    s.C[blk] = restrict_block(prob.dense_block(prob.objective(), red.block_of[blk]), red.kept_index[blk]);
  }
  s.c.resize(nf);
  for (int k = 0; k < nf; ++k) {
    s.c(k) = c_full(kept_free[k]);
  }
  red.kept_free = std::move(kept_free);
  return red;
}

inline Eigen::MatrixXd psd_project(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

inline void fill_solution(const SDPProblem& prob, const Reduction& red, const IpmResult& r,
                          const std::vector<Eigen::MatrixXd>& Xs, SDPSolution& sol) {
  const int nb = static_cast<int>(prob.blocks().size());
  std::vector<Eigen::MatrixXd> full;
  for (int b = 0; b < nb; ++b) {
    full.push_back(Eigen::MatrixXd::Zero(prob.blocks()[b], prob.blocks()[b]));
  }
  for (std::size_t rb = 0; rb < red.block_of.size() && rb < Xs.size(); ++rb) {
    const auto& idx = red.kept_index[rb];
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        full[red.block_of[rb]](idx[a], idx[c]) = Xs[rb](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
      }
    }
  }
  sol.primal_blocks.clear();
  for (auto& m : full) {
    sol.primal_blocks.emplace_back(m);
  }
  sol.free_values = Eigen::VectorXd::Zero(prob.n_free());
  for (std::size_t k = 0; k < red.kept_free.size(); ++k) {
    sol.free_values(red.kept_free[k]) = r.x(static_cast<Eigen::Index>(k));
  }
  sol.dual = Eigen::VectorXd::Zero(prob.n_constraints());
  for (std::size_t k = 0; k < red.kept_rows.size(); ++k) {
    sol.dual(red.kept_rows[k]) = r.y(static_cast<Eigen::Index>(k)) / red.row_norms[k];
  }
  // Dual slack C - A^*(y) on the original blocks.
  sol.dual_slacks.clear();
  for (int b = 0; b < nb; ++b) {
    Eigen::MatrixXd z = prob.dense_block(prob.objective(), b);
    for (int i = 0; i < prob.n_constraints(); ++i) {
      if (sol.dual(i) != 0.0) {
        z -= sol.dual(i) * prob.dense_block(prob.constraints()[static_cast<std::size_t>(i)].lhs, b);
      }
    }
    sol.dual_slacks.emplace_back(z);
  }
  sol.primal_residual = r.pinf;
  sol.dual_residual = r.dinf;
  sol.gap = r.gap;
  sol.iterations += r.iterations;
}

/// Recomputes sum_i y_i A_i over every block of the original problem.
inline std::vector<Eigen::MatrixXd> adjoint(const SDPProblem& prob, const Eigen::VectorXd& y) {
  const int nb = static_cast<int>(prob.blocks().size());
  std::vector<Eigen::MatrixXd> out;
  for (int b = 0; b < nb; ++b) {
    out.push_back(Eigen::MatrixXd::Zero(prob.blocks()[b], prob.blocks()[b]));
  }
  for (int i = 0; i < prob.n_constraints(); ++i) {
    if (y(i) == 0.0) {
      continue;
    }
    for (int b = 0; b < nb; ++b) {
      out[b] += y(i) * prob.dense_block(prob.constraints()[static_cast<std::size_t>(i)].lhs, b);
    }
  }
  return out;
}

}  // namespace detail

/// Checks an infeasibility certificate. `facial_rows` lists rows that,
/// in order, each read sum_k a_k X_b(k,k) = 0 with one-signed a_k on the
/// face left by the previous rows (so those entries vanish); y must then
/// satisfy sum_i y_i A_i ⪰ -tol on that face, |F^T y| <= tol and b·y < 0.
inline bool verify_farkas(const SDPProblem& prob, const Eigen::VectorXd& y, double tol = 1e-7,
                          const std::vector<int>& facial_rows = {}) {
  if (y.size() != prob.n_constraints()) {
    return false;
  }
  const int nb = static_cast<int>(prob.blocks().size());
  std::vector<std::vector<char>> keep(nb);
  for (int b = 0; b < nb; ++b) {
    keep[b].assign(static_cast<std::size_t>(prob.blocks()[b]), 1);
  }
  for (int i : facial_rows) {
    if (i < 0 || i >= prob.n_constraints()) {
      return false;
    }
    const auto& con = prob.constraints()[static_cast<std::size_t>(i)];
    if (con.rhs != 0.0 || (prob.n_free() > 0 && prob.dense_free(con.lhs).cwiseAbs().maxCoeff() != 0.0)) {
      return false;
    }
    int sign = 0;
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd a = prob.dense_block(con.lhs, b);
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
          if (!keep[b][r] || !keep[b][c] || a(r, c) == 0.0) {
            continue;
          }
          const int sg = a(r, c) > 0 ? 1 : -1;
          if (r != c || (sign != 0 && sg != sign)) {
            return false;
          }
          sign = sg;
        }
      }
    }
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd a = prob.dense_block(con.lhs, b);
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        if (a(r, r) != 0.0) {
          keep[b][r] = 0;
        }
      }
    }
  }
  Eigen::VectorXd bvec(prob.n_constraints());
  Eigen::VectorXd fty = Eigen::VectorXd::Zero(prob.n_free());
  for (int i = 0; i < prob.n_constraints(); ++i) {
    const auto& con = prob.constraints()[static_cast<std::size_t>(i)];
    bvec(i) = con.rhs;
    fty += y(i) * prob.dense_free(con.lhs);
  }
  const double by = bvec.dot(y);
  if (!(by < 0.0)) {
    return false;
  }
  const double scale = -by;
  const auto adj = detail::adjoint(prob, y);
  for (int b = 0; b < nb; ++b) {
    std::vector<int> idx;
    for (int k = 0; k < prob.blocks()[b]; ++k) {
      if (keep[b][k]) {
        idx.push_back(k);
      }
    }
    if (!idx.empty() && min_eigenvalue(detail::restrict_block(adj[b], idx)) < -tol * scale) {
      return false;
    }
  }
  return fty.lpNorm<Eigen::Infinity>() <= tol * scale;
}

/// Verifies the certificate attached to an Infeasible solution.
inline bool verify_infeasibility(const SDPProblem& prob, const SDPSolution& sol, double tol = 1e-7) {
  return sol.status == SolveStatus::Infeasible && verify_farkas(prob, sol.farkas, tol, sol.facial_rows);
}

namespace detail {

inline SDPSolution solve_feasibility(const SDPProblem& prob, const Reduction& red,
                                     const SolverSettings& settings) {
  SDPSolution sol;
  sol.warnings = red.warnings;
  const DenseSDP& base = red.sdp;
  const int nb = static_cast<int>(base.dims.size());

  // Shifted problem: X' = X + tI ⪰ 0, minimize t subject to t >= -1.
  DenseSDP s;
  s.dims = base.dims;
  s.dims.push_back(1);
  s.nf = base.nf + 1;
  s.m = base.m + 1;
  const int t_col = base.nf;
  s.A.resize(s.m);
  s.nz.resize(s.m);
  s.F = Eigen::MatrixXd::Zero(s.m, s.nf);
  s.b.resize(s.m);
  for (int i = 0; i < base.m; ++i) {
    s.A[i] = base.A[i];
    s.A[i].push_back(Eigen::MatrixXd::Zero(1, 1));
    s.nz[i] = base.nz[i];
    s.nz[i].push_back(0);
    double tr = 0.0;
    for (int b = 0; b < nb; ++b) {
      tr += base.A[i][b].trace();
    }
    if (base.nf > 0) {
      s.F.row(i).head(base.nf) = base.F.row(i);
    }
    s.F(i, t_col) = -tr;
    s.b(i) = base.b(i);
  }
  const int last = base.m;
  for (int b = 0; b < nb; ++b) {
    s.A[last].push_back(Eigen::MatrixXd::Zero(base.dims[b], base.dims[b]));
    s.nz[last].push_back(0);
  }
  s.A[last].push_back(-Eigen::MatrixXd::Identity(1, 1));
  s.nz[last].push_back(1);
  s.F(last, t_col) = 1.0;
  s.b(last) = -1.0;
  for (int b = 0; b <= nb; ++b) {
    s.C.push_back(Eigen::MatrixXd::Zero(s.dims[b], s.dims[b]));
  }
  s.c = Eigen::VectorXd::Zero(s.nf);
  s.c(t_col) = 1.0;

  const IpmResult r = run_ipm(s, settings);
  sol.iterations = r.iterations;
  if (r.X.empty()) {
    sol.status = SolveStatus::Inaccurate;
    return sol;
  }
  const double t = r.x(t_col);
  sol.infeasibility_shift = t;

  // Strip the auxiliary pieces before reporting.
  IpmResult stripped = r;
  stripped.X.pop_back();
  stripped.Z.pop_back();
  stripped.x = r.x.head(base.nf);
  stripped.y = r.y.head(base.m);

  const bool accurate = r.converged || (r.pinf <= 1e3 * settings.feas_tol && r.dinf <= 1e3 * settings.feas_tol);
  if (accurate && t <= settings.feasibility_tol) {
    std::vector<Eigen::MatrixXd> Xs;
    for (int b = 0; b < nb; ++b) {
      Eigen::MatrixXd shifted = stripped.X[b] - t * Eigen::MatrixXd::Identity(base.dims[b], base.dims[b]);
      Xs.push_back(t > 0 ? psd_project(shifted) : shifted);
    }
    fill_solution(prob, red, stripped, Xs, sol);
    // Residual of the reported point in the scaled constraint system.
    double res2 = 0.0;
    for (int i = 0; i < base.m; ++i) {
      double v = base.b(i);
      for (int b = 0; b < nb; ++b) {
        v -= base.A[i][b].cwiseProduct(Xs[b]).sum();
      }
      if (base.nf > 0) {
        v -= base.F.row(i).dot(stripped.x);
      }
      res2 += v * v;
    }
    sol.primal_residual = std::sqrt(res2) / (1.0 + base.b.norm());
    sol.primal_objective = sol.dual_objective = 0.0;
    sol.status = r.converged ? SolveStatus::Optimal : SolveStatus::Inaccurate;
    if (!r.converged) {
      sol.warnings.push_back("feasibility solve stopped before full convergence");
    }
    return sol;
  }

  if (accurate && r.dobj > settings.feasibility_tol) {
    // Dual of the shifted problem: -sum y_i A_i ⪰ 0 and b·y > 0.
    const Eigen::VectorXd yr = stripped.y;
    const double by = base.b.dot(yr);
    if (by > 0.0) {
      Eigen::VectorXd y_full = Eigen::VectorXd::Zero(prob.n_constraints());
      for (std::size_t k = 0; k < red.kept_rows.size(); ++k) {
        y_full(red.kept_rows[k]) = -yr(static_cast<Eigen::Index>(k)) / red.row_norms[k] / by;
      }
      fill_solution(prob, red, stripped, stripped.X, sol);
      sol.farkas = y_full;
      sol.facial_rows = red.facial_rows;
      if (verify_farkas(prob, y_full, 1e-6, red.facial_rows)) {
        sol.status = SolveStatus::Infeasible;
        return sol;
      }
      sol.warnings.push_back("infeasibility certificate failed verification");
    }
  }
  fill_solution(prob, red, stripped, stripped.X, sol);
  sol.status = SolveStatus::Inaccurate;
  return sol;
}

}  // namespace detail

/// Solves the problem. Returns Optimal (feasible, for Sense::Feasibility)
/// with gap and residuals within tolerance, Infeasible with a verified
/// Farkas certificate, Unbounded, or Inaccurate when neither could be
/// established.
inline SDPSolution solve(const SDPProblem& prob, const SolverSettings& settings = {}) {
  detail::Reduction red = detail::reduce_problem(prob);
  if (red.inconsistent) {
    SDPSolution sol;
    sol.status = SolveStatus::Infeasible;
    sol.farkas = red.farkas;
    sol.facial_rows = red.facial_rows;
    sol.warnings = red.warnings;
    sol.warnings.push_back("linear constraints are inconsistent");
    return sol;
  }
  if (prob.sense() == Sense::Feasibility) {
    return detail::solve_feasibility(prob, red, settings);
  }
  if (red.free_direction_unbounded) {
    SDPSolution sol = detail::solve_feasibility(prob, red, settings);
    if (sol.status == SolveStatus::Optimal) {
      sol.status = SolveStatus::Unbounded;
      sol.warnings.push_back("objective decreases along a free direction");
    }
    return sol;
  }

  const detail::IpmResult r = detail::run_ipm(red.sdp, settings);
  if (r.converged) {
    SDPSolution sol;
    sol.warnings = red.warnings;
    detail::fill_solution(prob, red, r, r.X, sol);
    sol.primal_objective = r.pobj;
    sol.dual_objective = r.dobj;
    sol.status = SolveStatus::Optimal;
    return sol;
  }
  SDPSolution feas = detail::solve_feasibility(prob, red, settings);
  const double relaxed = 100.0;
  if (feas.status == SolveStatus::Optimal && !r.X.empty() && r.gap <= relaxed * settings.gap_tol &&
      r.pinf <= relaxed * settings.feas_tol && r.dinf <= relaxed * settings.feas_tol) {
    SDPSolution sol;
    sol.warnings = red.warnings;
    detail::fill_solution(prob, red, r, r.X, sol);
    sol.primal_objective = r.pobj;
    sol.dual_objective = r.dobj;
    sol.status = SolveStatus::Optimal;
    sol.warnings.push_back("solved to reduced accuracy (within 100x of the requested tolerances)");
    return sol;
  }
  if (feas.status == SolveStatus::Infeasible) {
    feas.iterations += r.iterations;
    return feas;
  }
  SDPSolution sol;
  sol.warnings = red.warnings;
  if (!r.X.empty()) {
    detail::fill_solution(prob, red, r, r.X, sol);
  }
  sol.primal_objective = r.pobj;
  sol.dual_objective = r.dobj;
  if (feas.status == SolveStatus::Optimal && r.diverged && r.last_pobj < -1e6 && r.last_pinf < 1e-6) {
    sol.status = SolveStatus::Unbounded;
    sol.warnings.push_back("primal objective diverged to -infinity");
  } else {
    sol.status = SolveStatus::Inaccurate;
    sol.warnings.push_back("interior-point method did not reach the requested accuracy");
  }
  return sol;
}

inline SDPSolution solve(const SDPProblem& prob, double tol) {
  SolverSettings s;
  s.gap_tol = tol;
  s.feas_tol = tol;
  return solve(prob, s);
}

}  // namespace specshadow

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specshadow/error.hpp"
#include "specshadow/sdp/sym_matrix.hpp"

namespace specshadow {

enum class Sense { Minimize, Feasibility };

/// One linear functional on (PSD blocks, free scalars). Block entries
/// follow the "coefficient of X_b(i,j)" convention: adding v at (i,j)
/// contributes v*X(i,j); for i != j this is split evenly over (i,j) and
/// (j,i), so adding v at both (i,j) and (j,i) contributes 2v*X(i,j).
struct LinearFunctional {
  struct BlockEntry {
    int block;
    int i;
    int j;
    double value;
  };
  struct FreeEntry {
    int var;
    double value;
  };
  std::vector<BlockEntry> block_entries;
  std::vector<FreeEntry> free_entries;
};

struct Constraint {
  LinearFunctional lhs;
  double rhs = 0.0;
};

/// Block SDP in primal standard form
///
///   minimize   sum_b C_b∘X_b + c·x
///   subject to sum_b A_ib∘X_b + f_i·x = b_i,   X_b ⪰ 0,  x free.
///
/// With Sense::Feasibility the objective is ignored and the solver
/// decides whether the constraint set is nonempty.
class SDPProblem {
 public:
  SDPProblem() = default;

  int add_block(int dim) {
    require(dim >= 1, "PSD block dimension must be positive");
    blocks_.push_back(dim);
    return static_cast<int>(blocks_.size()) - 1;
  }

  /// Returns the index of the first new free variable.
  int add_free(int count = 1) {
    require(count >= 0, "negative free-variable count");
    const int first = n_free_;
    n_free_ += count;
    return first;
  }

  int add_constraint(double rhs = 0.0) {
    require(std::isfinite(rhs), "constraint right-hand side must be finite");
    constraints_.push_back(Constraint{{}, rhs});
    return static_cast<int>(constraints_.size()) - 1;
  }

  void set_rhs(int row, double rhs) {
    require(std::isfinite(rhs), "constraint right-hand side must be finite");
    constraints_.at(static_cast<std::size_t>(row)).rhs = rhs;
  }

  void add_block_coefficient(int row, int block, int i, int j, double v) {
    check_block_entry(block, i, j);
    if (v != 0.0) {
      constraints_.at(static_cast<std::size_t>(row)).lhs.block_entries.push_back({block, i, j, v});
    }
  }

  void add_free_coefficient(int row, int var, double v) {
    require(var >= 0 && var < n_free_, "free variable index out of range");
    if (v != 0.0) {
      constraints_.at(static_cast<std::size_t>(row)).lhs.free_entries.push_back({var, v});
    }
  }

  void add_objective_block(int block, int i, int j, double v) {
    check_block_entry(block, i, j);
    if (v != 0.0) {
      objective_.block_entries.push_back({block, i, j, v});
    }
  }

  void add_objective_free(int var, double v) {
    require(var >= 0 && var < n_free_, "free variable index out of range");
    if (v != 0.0) {
      objective_.free_entries.push_back({var, v});
    }
  }

  void set_sense(Sense s) { sense_ = s; }

  Sense sense() const { return sense_; }
  const std::vector<int>& blocks() const { return blocks_; }
  int n_free() const { return n_free_; }
  int n_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearFunctional& objective() const { return objective_; }

  /// Dense symmetric coefficient matrix of a functional on one block.
  Eigen::MatrixXd dense_block(const LinearFunctional& f, int block) const {
    const int k = blocks_.at(static_cast<std::size_t>(block));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : f.block_entries) {
      if (e.block != block) {
        continue;
      }
      if (e.i == e.j) {
        m(e.i, e.i) += e.value;
      } else {
        m(e.i, e.j) += 0.5 * e.value;
        m(e.j, e.i) += 0.5 * e.value;
      }
    }
    return m;
  }

  Eigen::VectorXd dense_free(const LinearFunctional& f) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_free_);
    for (const auto& e : f.free_entries) {
      v(e.var) += e.value;
    }
    return v;
  }

  /// Row-per-constraint listing for bug reports.
  std::string dump() const {
    std::ostringstream os;
    os.precision(12);
    os << "blocks:";
    for (int b : blocks_) {
      os << ' ' << b;
    }
    os << "\nfree: " << n_free_ << "\nsense: "
       << (sense_ == Sense::Minimize ? "minimize" : "feasibility") << "\n";
    auto write = [&](const LinearFunctional& f) {
      for (const auto& e : f.block_entries) {
        os << (e.value < 0 ? " - " : " + ") << std::abs(e.value) << "*B" << e.block << "["
           << e.i << "," << e.j << "]";
      }
      for (const auto& e : f.free_entries) {
        os << (e.value < 0 ? " - " : " + ") << std::abs(e.value) << "*x" << e.var;
      }
      if (f.block_entries.empty() && f.free_entries.empty()) {
        os << " 0";
      }
    };
    os << "objective:";
    write(objective_);
    os << "\n";
    for (std::size_t r = 0; r < constraints_.size(); ++r) {
      os << "c" << r << ":";
      write(constraints_[r].lhs);
      os << " = " << constraints_[r].rhs << "\n";
    }
    return os.str();
  }

 private:
  void check_block_entry(int block, int i, int j) const {
    require(block >= 0 && block < static_cast<int>(blocks_.size()), "block index out of range");
    const int k = blocks_[static_cast<std::size_t>(block)];
    require(i >= 0 && j >= 0 && i < k && j < k, "block entry index out of range");
  }

  std::vector<int> blocks_;
  int n_free_ = 0;
  std::vector<Constraint> constraints_;
  LinearFunctional objective_;
  Sense sense_ = Sense::Minimize;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Inaccurate };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::Inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

struct SolverSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  /// Eigenvalue slack tolerated on returned PSD blocks.
  double psd_tol = 1e-9;
  /// Feasibility problems: feasible iff the optimal shift t satisfies
  /// t <= feasibility_tol.
  double feasibility_tol = 1e-7;
  int max_iterations = 200;
  /// Per-iteration progress lines on stderr.
  bool verbose = false;
};

struct SDPSolution {
  SolveStatus status = SolveStatus::Inaccurate;
  std::vector<SymMatrix> primal_blocks;
  Eigen::VectorXd free_values;
  /// Multipliers y, one per constraint of the original problem.
  Eigen::VectorXd dual;
  std::vector<SymMatrix> dual_slacks;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  /// Feasibility problems: optimal value of the shift t in X + tI ⪰ 0.
  double infeasibility_shift = 0.0;
  /// Infeasible: y with sum_i y_i A_i ⪰ 0, f_i·y = 0 per free column and
  /// b·y = -1, which rules out every X ⪰ 0 with A(X) + Fx = b.
  Eigen::VectorXd farkas;
  /// Rows whose one-signed diagonal entries and zero right-hand side force
  /// parts of X to vanish; when nonempty, `farkas` is a certificate on the
  /// face they leave (see verify_infeasibility).
  std::vector<int> facial_rows;
  std::vector<std::string> warnings;
};

}  // namespace specshadow

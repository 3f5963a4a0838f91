#pragma once

#include <functional>
#include <vector>

#include "nvie/types.hpp"

namespace nvie {

struct SolveConfig {
  double tolerance = 1e-10;  // on ||V c - rhs|| / ||rhs||
  int restart = 60;
  int max_iterations = 2000;

  void validate() const;
};

struct SolveResult {
  Eigen::VectorXcd x;
  /// Relative residual estimate after every inner iteration, starting with 1.
  std::vector<double> residual_history;
  int iterations = 0;
  /// ||V x - rhs|| / ||rhs|| recomputed from the returned x.
  double residual = 0;
};

using LinearOperator = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

/// Restarted GMRES (modified Gram-Schmidt, Givens rotations), zero initial guess.
/// Throws ConvergenceError with the final residual after max_iterations.
SolveResult krylov_solve(const LinearOperator& apply, const Eigen::VectorXcd& rhs,
                         const SolveConfig& config = {});

SolveResult krylov_solve(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs,
                         const SolveConfig& config = {});

}  // namespace nvie

#include "nvie/solver.hpp"

#include <cmath>

#include "nvie/errors.hpp"

namespace nvie {

void SolveConfig::validate() const {
  if (!(tolerance > 0)) throw ConfigError("solver tolerance must be positive");
  if (restart < 1) throw ConfigError("solver restart length must be at least 1");
  if (max_iterations < 1) throw ConfigError("solver iteration limit must be at least 1");
}

SolveResult krylov_solve(const LinearOperator& apply, const Eigen::VectorXcd& rhs,
                         const SolveConfig& config) {
  config.validate();
  const Eigen::Index n = rhs.size();
  SolveResult out;
  out.x = Eigen::VectorXcd::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0) {
    out.residual_history = {0.0};
    return out;
  }
  const int m = static_cast<int>(std::min<Eigen::Index>(config.restart, n));
  Eigen::MatrixXcd V(n, m + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  Eigen::VectorXcd cs(m), sn(m), g(m + 1), w(n), r(n);
  out.residual_history.push_back(1.0);

  double rel = 1.0;
  while (true) {
    apply(out.x, r);
    r = rhs - r;
    double beta = r.norm();
    rel = beta / bnorm;
    if (rel <= config.tolerance) break;
    if (out.iterations >= config.max_iterations) {
      throw ConvergenceError("GMRES did not converge", rel, out.iterations);
    }
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int used = 0;
    for (int j = 0; j < m && out.iterations < config.max_iterations; ++j) {
      apply(V.col(j), w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const Complex t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(std::abs(H(j, j)), hn);
      cs[j] = denom == 0 ? Complex(1) : H(j, j) / denom;
      sn[j] = denom == 0 ? Complex(0) : Complex(hn / denom);
      H(j, j) = denom;
      H(j + 1, j) = 0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      ++out.iterations;
      ++used;
      rel = std::abs(g[j + 1]) / bnorm;
      out.residual_history.push_back(rel);
      if (rel <= config.tolerance || hn == 0) break;
      V.col(j + 1) = w / hn;
    }
    const Eigen::VectorXcd y =
        H.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    out.x += V.leftCols(used) * y;
  }
  out.residual = rel;
  return out;
}

SolveResult krylov_solve(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs,
                         const SolveConfig& config) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) {
    throw DomainError("krylov_solve: matrix and right-hand side do not conform");
  }
  return krylov_solve([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out.noalias() = matrix * v; },
                      rhs, config);
}

}  // namespace nvie

#include "nvie/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "nvie/errors.hpp"
#include "nvie/types.hpp"

namespace nvie {

namespace {

QuadratureRule1D compute_gauss_legendre(int n) {
  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    const double w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule1D& gauss_legendre(int n) {
  if (n < 1) throw InvalidOrderError("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule1D>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureRule1D>(compute_gauss_legendre(n));
  return *slot;
}

QuadratureRule1D gauss_legendre(int n, double a, double b) {
  QuadratureRule1D rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

void lagrange_basis(const std::vector<double>& nodes, double x, double* out) {
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) v *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    }
    out[i] = v;
  }
}

}  // namespace nvie

#pragma once

#include <vector>

namespace nvie {

struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
/// Rules are computed once per n and cached.
const QuadratureRule1D& gauss_legendre(int n);

/// Gauss-Legendre rule mapped affinely onto [a, b].
QuadratureRule1D gauss_legendre(int n, double a, double b);

/// Lagrange cardinal polynomials through `nodes`, evaluated at x.
/// out[i] = prod_{j != i} (x - x_j) / (x_i - x_j).
void lagrange_basis(const std::vector<double>& nodes, double x, double* out);

}  // namespace nvie

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nvie/errors.hpp"
#include "nvie/types.hpp"

namespace nvie {

enum class ReferenceShape : std::uint8_t { cube = 0, sphere = 1 };

const char* to_string(ReferenceShape shape);

/// Collocation nodes and their cardinal interpolation basis on a reference
/// domain: the cube [-1,1]^3 or the unit ball.
///
/// Cube: tensor Lagrange on p Gauss nodes per direction, node index
/// ix + p * (iy + p * iz).
///
/// Sphere: Lagrange in r on m_r Gauss radii in (0,1); in the angles,
/// trigonometric interpolation on the doubled sphere, theta in [0, 2 pi) with
/// f(2 pi - theta, phi + pi) = f(theta, phi), over the m_theta + 1 equally
/// spaced angles k*pi/m_theta (poles included) and 2*m_phi equally spaced phi. Per radius the nodes are: north pole, the m_theta - 1 rings of
/// 2*m_phi nodes each, south pole; M = m_r * (2 m_phi (m_theta - 1) + 2).
class CollocationGrid {
 public:
  static CollocationGrid cube(int p);
  static CollocationGrid sphere(int m_r, int m_theta, int m_phi);
  static CollocationGrid make(ReferenceShape shape, const std::array<int, 3>& params);

  ReferenceShape shape() const { return shape_; }
  /// (p, p, p) for the cube, (m_r, m_theta, m_phi) for the sphere.
  const std::array<int, 3>& params() const { return params_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Vec3& node(int j) const { return nodes_[j]; }

  /// Equivalent number of collocation points per direction, M^(1/3).
  double effective_order() const;
  double reference_volume() const;

  bool contains(const Vec3& x, double slack = 1e-12) const;
  double distance_to_boundary(const Vec3& x) const;
  /// Smallest node-to-boundary distance; exclusion radii must stay below it.
  double min_boundary_distance() const;

  /// Values of all M basis functions at x (no domain check).
  void basis(const Vec3& x, double* out) const;
  Eigen::VectorXd basis(const Vec3& x) const;

  /// Interpolatory weights of the regular rule: integral of each basis
  /// function over the reference domain.
  const Eigen::VectorXd& regular_weights() const { return regular_weights_; }

  // Cube: 1-D Gauss nodes. Sphere: Gauss radii in (0,1).
  const std::vector<double>& radial_or_axis_nodes() const { return axis_nodes_; }

 private:
  CollocationGrid() = default;
  void sphere_coordinates_basis(double r, double theta, double phi, double* out) const;

  ReferenceShape shape_ = ReferenceShape::cube;
  std::array<int, 3> params_{};
  std::vector<Vec3> nodes_;
  std::vector<double> axis_nodes_;
  Eigen::VectorXd regular_weights_;
};

/// sum_j values[j] * phi_j(x); throws DomainError outside the reference domain.
template <typename Values>
auto interpolate(const CollocationGrid& grid, const Values& values, const Vec3& x) {
  if (!grid.contains(x)) throw DomainError("interpolate: point outside the reference domain");
  const Eigen::VectorXd phi = grid.basis(x);
  using V = std::decay_t<decltype(values[0])>;
  V acc = values[0] * phi[0];
  for (int j = 1; j < grid.size(); ++j) acc += values[j] * phi[j];
  return acc;
}

}  // namespace nvie

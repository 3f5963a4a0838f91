#pragma once

#include <array>
#include <vector>

#include "nvie/greens.hpp"
#include "nvie/grid.hpp"
#include "nvie/types.hpp"

namespace nvie {

struct Scatterer {
  ReferenceShape shape = ReferenceShape::cube;
  double size = 1.0;  // side length of a cube, radius of a sphere
  Vec3 center = Vec3::Zero();
  Complex delta_eps{0.0, 0.0};
  /// Cube: (p, p, p). Sphere: (m_r, m_theta, m_phi).
  std::array<int, 3> grid_params{3, 3, 3};

  /// Maps the reference domain onto the element: x = center + scale * xi.
  double scale() const;
  Vec3 to_physical(const Vec3& xi) const { return center + scale() * xi; }
  Vec3 to_reference(const Vec3& x) const { return (x - center) / scale(); }
  bool contains(const Vec3& x, double slack = 1e-12) const;
  double volume() const;
};

/// polarization * exp(i wave_vector . r), applied to every component.
struct IncidentWave {
  CVec3 polarization{1.0, 0.0, 0.0};
  Vec3 wave_vector{0.0, 0.0, 1.0};

  CVec3 operator()(const Vec3& r) const;
};

std::vector<CVec3> incident_eval(const IncidentWave& incident, const std::vector<Vec3>& points);

struct Scene {
  WaveParams<double> wave = WaveParams<double>::make(1.0, 1.0, 1.0);
  /// Exclusion radius on the reference domain; the physical ball about a node
  /// of element i has radius scale_i * delta.
  double delta = 1e-3;
  IncidentWave incident;
  std::vector<Scatterer> scatterers;

  /// Throws ConfigError for invalid sizes, grids, polarizations or overlaps.
  void validate() const;
  /// Index of the scatterer containing x, or -1.
  int element_containing(const Vec3& x) const;
};

bool scatterers_overlap(const Scatterer& a, const Scatterer& b);

}  // namespace nvie

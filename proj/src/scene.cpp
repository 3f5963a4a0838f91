#include "nvie/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvie/errors.hpp"

namespace nvie {

double Scatterer::scale() const { return shape == ReferenceShape::cube ? 0.5 * size : size; }

bool Scatterer::contains(const Vec3& x, double slack) const {
  const Vec3 d = x - center;
  if (shape == ReferenceShape::cube) return d.cwiseAbs().maxCoeff() <= 0.5 * size * (1 + slack);
  return d.norm() <= size * (1 + slack);
}

double Scatterer::volume() const {
  return shape == ReferenceShape::cube ? size * size * size : 4.0 * kPi / 3.0 * size * size * size;
}

CVec3 IncidentWave::operator()(const Vec3& r) const {
  return polarization * std::exp(Complex(0.0, wave_vector.dot(r)));
}

std::vector<CVec3> incident_eval(const IncidentWave& incident, const std::vector<Vec3>& points) {
  std::vector<CVec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(incident(p));
  return out;
}

bool scatterers_overlap(const Scatterer& a, const Scatterer& b) {
  const double tol = 1e-12 * std::max(a.size, b.size);
  const Vec3 d = b.center - a.center;
  if (a.shape == ReferenceShape::cube && b.shape == ReferenceShape::cube) {
    const double reach = 0.5 * (a.size + b.size) - tol;
    return (d.cwiseAbs().array() < reach).all();
  }
  if (a.shape == ReferenceShape::sphere && b.shape == ReferenceShape::sphere) {
    return d.norm() < a.size + b.size - tol;
  }
  const Scatterer& cube = a.shape == ReferenceShape::cube ? a : b;
  const Scatterer& ball = a.shape == ReferenceShape::cube ? b : a;
  const Vec3 rel = ball.center - cube.center;
  const Vec3 nearest = rel.cwiseMax(Vec3::Constant(-0.5 * cube.size))
                           .cwiseMin(Vec3::Constant(0.5 * cube.size));
  return (rel - nearest).norm() < ball.size - tol;
}

void Scene::validate() const {
  if (!(delta > 0)) throw ConfigError("delta must be positive");
  if (incident.polarization.norm() == 0) throw ConfigError("incident polarization is zero");
  if (scatterers.empty()) throw ConfigError("scene has no scatterers");
  for (std::size_t i = 0; i < scatterers.size(); ++i) {
    const auto& s = scatterers[i];
    if (!(s.size > 0)) throw ConfigError("scatterer " + std::to_string(i + 1) + ": size must be positive");
    try {
      (void)CollocationGrid::make(s.shape, s.grid_params);
    } catch (const InvalidOrderError& e) {
      throw ConfigError("scatterer " + std::to_string(i + 1) + ": " + e.what());
    }
    for (std::size_t l = 0; l < i; ++l) {
      if (scatterers_overlap(scatterers[l], s)) {
        throw ConfigError("scatterers " + std::to_string(l + 1) + " and " + std::to_string(i + 1) +
                          " overlap");
      }
    }
  }
}

int Scene::element_containing(const Vec3& x) const {
  for (std::size_t i = 0; i < scatterers.size(); ++i)
    if (scatterers[i].contains(x)) return static_cast<int>(i);
  return -1;
}

}  // namespace nvie

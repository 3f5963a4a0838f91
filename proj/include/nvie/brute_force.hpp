#pragma once

// Direct polar-coordinate integration of kernel moments
//   int_{D \ B(r_j, delta)} f(r') h(u) / R^k dV',   k = 1, 2, 3,  h in {1, uu},
// used as the reference against which the weight tables are checked.
//
// Around r_j a cube of half-width w (the distance to the domain boundary) is
// integrated in polar coordinates: one pyramid per face, tensor Gauss on the
// face, Gauss in the radius with the f(r_j) log term split off for k = 3. The
// rest of a cubic domain is cut into at most 26 boxes with tensor Gauss rules.
// A ball domain is integrated in polar coordinates about r_j with the polar
// axis pointing away from the centre. Every result is recomputed with twice
// the points per direction until two successive values agree.

#include <array>
#include <functional>
#include <vector>

#include "nvie/grid.hpp"
#include "nvie/types.hpp"

namespace nvie {

struct Domain {
  ReferenceShape shape = ReferenceShape::cube;
  Vec3 center = Vec3::Zero();
  double size = 1.0;  // half side of the cube, radius of the ball

  static Domain reference(ReferenceShape shape) { return Domain{shape, Vec3::Zero(), 1.0}; }
  double distance_to_boundary(const Vec3& x) const;
};

/// Moments for one integrand: scalar[k-1] = int f / R^k, dyadic[k-1] = int f uu / R^k.
struct KernelMoments {
  std::array<double, 3> scalar{};
  std::array<RealDyadic, 3> dyadic{RealDyadic::Zero(), RealDyadic::Zero(), RealDyadic::Zero()};
};

struct BruteForceOptions {
  int points = 32;
  double tolerance = 1e-7;
  int max_doublings = 2;
};

/// f(x, out) writes n_values integrand values at x.
using MultiIntegrand = std::function<void(const Vec3&, double*)>;

std::vector<KernelMoments> brute_force_moments(const Domain& domain, const Vec3& r_j,
                                               double delta, int n_values,
                                               const MultiIntegrand& f,
                                               const BruteForceOptions& options = {});

KernelMoments brute_force_moments(const Domain& domain, const Vec3& r_j, double delta,
                                  const std::function<double(const Vec3&)>& f,
                                  const BruteForceOptions& options = {});

enum class KernelFactor { one, uu };

/// Single moment; for KernelFactor::one the value sits on the diagonal.
RealDyadic brute_force_integral(const Domain& domain, const Vec3& r_j, double delta, int k,
                                KernelFactor h, const std::function<double(const Vec3&)>& f,
                                const BruteForceOptions& options = {});

}  // namespace nvie

#pragma once

// Interior field of a homogeneous dielectric sphere (radius a, relative
// index m) under the plane wave i_x exp(ikz), as a series of vector
// spherical harmonics M_o1n, N_e1n with coefficients c_n, d_n.

#include <vector>

#include "nvie/types.hpp"

namespace nvie {

Complex spherical_bessel_j(int n, Complex z);
Complex spherical_hankel1(int n, Complex z);
/// j_0..j_{n_max}(z).
std::vector<Complex> spherical_bessel_j_sequence(int n_max, Complex z);
/// h^(1)_0..h^(1)_{n_max}(z); DomainError at z = 0.
std::vector<Complex> spherical_hankel1_sequence(int n_max, Complex z);
/// [z f_n(z)]' = z f_{n-1}(z) - n f_n(z) from a sequence f_0..f_{n_max}; entry 0 unused.
std::vector<Complex> riccati_derivative(const std::vector<Complex>& f, Complex z);

struct AngularFunctions {
  std::vector<double> pi;   // pi_0 .. pi_{n_max}
  std::vector<double> tau;  // tau_0 .. tau_{n_max}
};

AngularFunctions angular_functions(double cos_theta, int n_max);

enum class MieConvention {
  /// Series exactly as written, time dependence exp(-i omega t).
  as_printed,
  /// Field matching the kernel exp(-ikR)/(4 pi R) with the same incident
  /// wave: E(x, y, z) = conj(diag(1, -1, -1) E_printed(x, -y, -z)), the
  /// printed series taken with index conj(m).
  conjugate_kernel,
};

struct MieConfig {
  double a = 1.0;
  double k = 1.0;
  Complex m{1.0, 0.0};
  /// Series length; 0 selects 20 (or more when the tail test demands it).
  int n_max = 0;
  MieConvention convention = MieConvention::conjugate_kernel;
};

struct MieCoefficients {
  std::vector<Complex> c;  // index n = 1..n_max, entry 0 unused
  std::vector<Complex> d;
  int n_max() const { return static_cast<int>(c.size()) - 1; }
};

MieCoefficients mie_coefficients(const MieConfig& config, int n_max);
/// Coefficients with the series length chosen by the tail test
/// (last term below 1e-12 of the first, at most 200 terms).
MieCoefficients mie_coefficients(const MieConfig& config);

/// Cartesian field at a point with |point| <= a; DomainError outside.
CVec3 mie_interior_field(const MieConfig& config, const Vec3& point);
CVec3 mie_interior_field(const MieConfig& config, const MieCoefficients& coeffs, const Vec3& point);

}  // namespace nvie

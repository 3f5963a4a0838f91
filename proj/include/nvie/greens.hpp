#pragma once

// Free-space scalar and dyadic Green's functions with the singular/smooth
// split g = g0 + g_smooth used by the finite-exclusion-volume formulation.
//
// Kernel convention: g(r, r') = exp(-i k R) / (4 pi R), R = |r - r'|.
// All Hessians are taken with respect to the field point r; for radial
// functions they are symmetric in r <-> r'.

#include <array>
#include <cmath>
#include <string>
#include <complex>

#include "nvie/errors.hpp"
#include "nvie/types.hpp"

namespace nvie {

template <typename T>
struct WaveParams {
  T omega{1};
  T mu{1};
  T eps_background{1};
  T k{1};

  static WaveParams make(T omega, T mu, T eps_background) {
    if (!(omega > 0) || !(mu > 0) || !(eps_background > 0)) {
      throw DomainError("WaveParams: omega, mu and eps_background must be positive");
    }
    return WaveParams{omega, mu, eps_background, omega * std::sqrt(eps_background * mu)};
  }
};

template <typename T>
struct SeparationGeometry {
  T R{0};
  Point3<T> u = Point3<T>::Zero();  // (r' - r) / R

  static SeparationGeometry from(const Point3<T>& r, const Point3<T>& r_prime) {
    SeparationGeometry g;
    const Point3<T> d = r_prime - r;
    g.R = d.norm();
    if (g.R > 0) g.u = d / g.R;
    return g;
  }
};

/// Branch switch for the cancellation-free Taylor expansions of g_smooth.
inline constexpr double kSmoothSeriesSwitch = 1e-2;

namespace detail {

template <typename T>
SeparationGeometry<T> separation_or_throw(const Point3<T>& r, const Point3<T>& rp,
                                          const char* who) {
  auto geo = SeparationGeometry<T>::from(r, rp);
  if (!(geo.R > 0)) throw DomainError(std::string(who) + ": coincident points");
  return geo;
}

template <typename T>
DyadicValue<T> radial_hessian(std::complex<T> d2, std::complex<T> d1_over_r,
                              const Point3<T>& u) {
  const Eigen::Matrix<T, 3, 3> uu = u * u.transpose();
  const Eigen::Matrix<T, 3, 3> id = Eigen::Matrix<T, 3, 3>::Identity();
  return uu.template cast<std::complex<T>>() * d2 +
         (id - uu).template cast<std::complex<T>>() * d1_over_r;
}

// Coefficients (-ik)^n / n! of exp(-ikR) - 1 = sum_{n>=1} c_n R^n.
template <typename T, int N>
std::array<std::complex<T>, N + 1> exp_series(T k) {
  std::array<std::complex<T>, N + 1> c{};
  c[0] = 1;
  const std::complex<T> mik(0, -k);
  for (int n = 1; n <= N; ++n) c[n] = c[n - 1] * mik / T(n);
  return c;
}

}  // namespace detail

template <typename T>
std::complex<T> scalar_green(const Point3<T>& r, const Point3<T>& r_prime, T k) {
  const T R = detail::separation_or_throw(r, r_prime, "scalar_green").R;
  return std::exp(std::complex<T>(0, -k * R)) / (T(4) * T(kPi) * R);
}

template <typename T>
std::complex<T> scalar_green(const Point3<T>& r, const Point3<T>& r_prime,
                             const WaveParams<T>& wave) {
  return scalar_green(r, r_prime, wave.k);
}

template <typename T>
T static_green_g0(const Point3<T>& r, const Point3<T>& r_prime) {
  const T R = detail::separation_or_throw(r, r_prime, "static_green_g0").R;
  return T(1) / (T(4) * T(kPi) * R);
}

/// g - g0 = (exp(-ikR) - 1) / (4 pi R); continuous at R = 0 with limit -ik/(4 pi).
template <typename T>
std::complex<T> smooth_green(T R, T k) {
  const T four_pi = T(4) * T(kPi);
  if (k * R < T(kSmoothSeriesSwitch)) {
    constexpr int N = 12;
    const auto c = detail::exp_series<T, N>(k);
    std::complex<T> s = 0;
    for (int n = N; n >= 1; --n) s = s * R + c[n];
    return s / four_pi;
  }
  return (std::exp(std::complex<T>(0, -k * R)) - T(1)) / (four_pi * R);
}

template <typename T>
std::complex<T> smooth_green(const Point3<T>& r, const Point3<T>& r_prime, T k) {
  return smooth_green((r - r_prime).norm(), k);
}

template <typename T>
std::complex<T> smooth_green(const Point3<T>& r, const Point3<T>& r_prime,
                             const WaveParams<T>& wave) {
  return smooth_green(r, r_prime, wave.k);
}

/// Hessian of g_smooth with respect to r. It behaves like -k^2 (I - uu) / (8 pi R)
/// near the source, so it is integrable but not bounded; coincident points throw.
template <typename T>
DyadicValue<T> hessian_smooth_green(const Point3<T>& r, const Point3<T>& r_prime, T k) {
  const auto geo = detail::separation_or_throw(r, r_prime, "hessian_smooth_green");
  const T R = geo.R;
  const T four_pi = T(4) * T(kPi);
  std::complex<T> d2, d1r;
  if (k * R < T(kSmoothSeriesSwitch)) {
    // f'/R = sum_{n>=2} c_n (n-1) R^{n-3},  f'' = sum_{n>=3} c_n (n-1)(n-2) R^{n-3}
    constexpr int N = 13;
    const auto c = detail::exp_series<T, N>(k);
    std::complex<T> a = 0, b = 0;
    for (int n = N; n >= 3; --n) {
      a = a * R + c[n] * T(n - 1);
      b = b * R + c[n] * T((n - 1) * (n - 2));
    }
    d1r = c[2] / R + a;  // the c_2 term carries the 1/R behaviour
    d2 = b;
  } else {
    const std::complex<T> E = std::exp(std::complex<T>(0, -k * R));
    const std::complex<T> ik(0, k);
    d1r = (-ik * E * R - (E - T(1))) / (R * R * R);
    d2 = (-k * k * E * R * R + T(2) * ik * E * R + T(2) * (E - T(1))) / (R * R * R);
  }
  return detail::radial_hessian<T>(d2 / four_pi, d1r / four_pi, geo.u);
}

template <typename T>
DyadicValue<T> hessian_smooth_green(const Point3<T>& r, const Point3<T>& r_prime,
                                    const WaveParams<T>& wave) {
  return hessian_smooth_green(r, r_prime, wave.k);
}

/// Hessian of g0: (3 uu - I) / (4 pi R^3), real, symmetric and traceless.
template <typename T>
Eigen::Matrix<T, 3, 3> hessian_g0(const Point3<T>& r, const Point3<T>& r_prime) {
  const auto geo = detail::separation_or_throw(r, r_prime, "hessian_g0");
  const T R3 = geo.R * geo.R * geo.R;
  return (T(3) * geo.u * geo.u.transpose() - Eigen::Matrix<T, 3, 3>::Identity()) /
         (T(4) * T(kPi) * R3);
}

/// Phase-free part of the dyadic Green's function:
///   (I - uu)/(4 pi R) - i (I - 3uu)/(4 pi k R^2) - (I - 3uu)/(4 pi k^2 R^3).
/// The full kernel is exp(-ikR) times this.
template <typename T>
DyadicValue<T> dyadic_green_envelope(T R, const Point3<T>& u, T k) {
  using C = std::complex<T>;
  const Eigen::Matrix<T, 3, 3> uu = u * u.transpose();
  const Eigen::Matrix<T, 3, 3> id = Eigen::Matrix<T, 3, 3>::Identity();
  const T four_pi = T(4) * T(kPi);
  const Eigen::Matrix<T, 3, 3> t1 = (id - uu) / (four_pi * R);
  const Eigen::Matrix<T, 3, 3> t3 = (id - T(3) * uu);
  return t1.template cast<C>() +
         t3.template cast<C>() * (C(0, -1) / (four_pi * R * R * k) - C(1) / (four_pi * R * R * R * k * k));
}

template <typename T>
DyadicValue<T> dyadic_green(const Point3<T>& r, const Point3<T>& r_prime, T k) {
  if (!(k > 0)) throw DomainError("dyadic_green: wavenumber must be positive");
  const auto geo = detail::separation_or_throw(r, r_prime, "dyadic_green");
  return std::exp(std::complex<T>(0, -k * geo.R)) * dyadic_green_envelope(geo.R, geo.u, k);
}

template <typename T>
DyadicValue<T> dyadic_green(const Point3<T>& r, const Point3<T>& r_prime,
                            const WaveParams<T>& wave) {
  return dyadic_green(r, r_prime, wave.k);
}

/// G minus its R^-3 and R^-1 parts,
///   G + (I - 3uu) / (4 pi k^2 R^3) - (I + uu) / (8 pi R),
/// which is bounded: -ik I / (6 pi) - k^2 R (3I - uu) / (32 pi) + O(R^2).
/// The R^-2 parts cancel identically.
template <typename T>
DyadicValue<T> dyadic_green_regular(const Point3<T>& r, const Point3<T>& r_prime, T k) {
  using C = std::complex<T>;
  if (!(k > 0)) throw DomainError("dyadic_green_regular: wavenumber must be positive");
  const auto geo = SeparationGeometry<T>::from(r, r_prime);
  const T R = geo.R, pi = T(kPi);
  const Eigen::Matrix<T, 3, 3> id = Eigen::Matrix<T, 3, 3>::Identity();
  if (!(R > 0)) return id.template cast<C>() * C(0, -k / (6 * pi));
  const Eigen::Matrix<T, 3, 3> uu = geo.u * geo.u.transpose();
  const T kR = k * R;
  if (kR < T(0.5)) {
    // exp(-ikR) minus its cubic Taylor polynomial, times the envelope
    C term = 1, tail = 0;
    for (int n = 1; n <= 30; ++n) {
      term *= C(0, -kR) / T(n);
      if (n >= 4) tail += term;
    }
    return dyadic_green_envelope(R, geo.u, k) * tail +
           id.template cast<C>() * C(-k * k * R / (12 * pi), -k / (6 * pi)) +
           (id - uu).template cast<C>() * C(0, k * k * k * R * R / (24 * pi));
  }
  return dyadic_green(r, r_prime, k) +
         ((id - T(3) * uu) / (4 * pi * k * k * R * R * R) - (id + uu) / (8 * pi * R)).template cast<C>();
}

enum class ExclusionShape { ball, cube };

/// Depolarization dyadic of the exclusion volume; only the ball is supported.
template <typename T = double>
DyadicValue<T> l_dyadic(ExclusionShape shape) {
  if (shape != ExclusionShape::ball) {
    throw UnsupportedShapeError("l_dyadic: only a ball exclusion volume is supported");
  }
  return DyadicValue<T>::Identity() / T(3);
}

}  // namespace nvie

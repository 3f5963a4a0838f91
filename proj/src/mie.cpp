#include "nvie/mie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvie/errors.hpp"

namespace nvie {

namespace {

constexpr Complex kI{0.0, 1.0};

// Miller's downward recurrence normalised by j_0 (or j_1 near zeros of sin z).
std::vector<Complex> bessel_downward(int n_max, Complex z) {
  const int start = n_max + 20 + static_cast<int>(std::abs(z));
  std::vector<Complex> f(start + 2, 0.0);
  f[start + 1] = 0.0;
  f[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    f[n - 1] = (2.0 * n + 1.0) / z * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e250) {
      for (int l = n - 1; l <= start; ++l) f[l] *= 1e-250;
    }
  }
  const Complex j0 = std::sin(z) / z;
  const Complex j1 = std::sin(z) / (z * z) - std::cos(z) / z;
  const Complex scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
  std::vector<Complex> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out[n] = f[n] * scale;
  return out;
}

}  // namespace

std::vector<Complex> spherical_bessel_j_sequence(int n_max, Complex z) {
  if (n_max < 0) throw DomainError("spherical_bessel_j_sequence: negative order");
  std::vector<Complex> j(n_max + 1, 0.0);
  if (z == Complex(0.0)) {
    j[0] = 1.0;
    return j;
  }
  if (std::abs(z) > n_max + 1.0) {
    j[0] = std::sin(z) / z;
    if (n_max >= 1) j[1] = std::sin(z) / (z * z) - std::cos(z) / z;
    for (int n = 1; n < n_max; ++n) j[n + 1] = (2.0 * n + 1.0) / z * j[n] - j[n - 1];
    return j;
  }
  return bessel_downward(n_max, z);
}

std::vector<Complex> spherical_hankel1_sequence(int n_max, Complex z) {
  if (n_max < 0) throw DomainError("spherical_hankel1_sequence: negative order");
  if (z == Complex(0.0)) throw DomainError("spherical_hankel1: z = 0");
  std::vector<Complex> h(n_max + 1);
  const Complex e = std::exp(kI * z);
  h[0] = -kI * e / z;
  if (n_max >= 1) h[1] = -e * (z + kI) / (z * z);
  for (int n = 1; n < n_max; ++n) h[n + 1] = (2.0 * n + 1.0) / z * h[n] - h[n - 1];
  return h;
}

Complex spherical_bessel_j(int n, Complex z) {
  if (n < 0) throw DomainError("spherical_bessel_j: negative order");
  if (n <= 2 && std::abs(z) >= 0.5) {
    const Complex s = std::sin(z), c = std::cos(z);
    if (n == 0) return s / z;
    if (n == 1) return s / (z * z) - c / z;
    return (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);
  }
  return spherical_bessel_j_sequence(n, z)[n];
}

Complex spherical_hankel1(int n, Complex z) {
  if (n < 0) throw DomainError("spherical_hankel1: negative order");
  return spherical_hankel1_sequence(n, z)[n];
}

std::vector<Complex> riccati_derivative(const std::vector<Complex>& f, Complex z) {
  std::vector<Complex> d(f.size(), 0.0);
  for (std::size_t n = 1; n < f.size(); ++n) d[n] = z * f[n - 1] - static_cast<double>(n) * f[n];
  return d;
}

AngularFunctions angular_functions(double cos_theta, int n_max) {
  if (std::abs(cos_theta) > 1.0 + 1e-14) throw DomainError("angular_functions: |cos theta| > 1");
  AngularFunctions a;
  a.pi.assign(n_max + 1, 0.0);
  a.tau.assign(n_max + 1, 0.0);
  if (n_max >= 1) {
    a.pi[1] = 1.0;
    a.tau[1] = cos_theta;
  }
  for (int n = 2; n <= n_max; ++n) {
    a.pi[n] = (2.0 * n - 1.0) / (n - 1.0) * cos_theta * a.pi[n - 1] - n / (n - 1.0) * a.pi[n - 2];
    a.tau[n] = n * cos_theta * a.pi[n] - (n + 1.0) * a.pi[n - 1];
  }
  return a;
}

MieCoefficients mie_coefficients(const MieConfig& cfg, int n_max) {
  if (!(cfg.a > 0) || !(cfg.k > 0)) throw DomainError("mie_coefficients: a and k must be positive");
  if (n_max < 1) throw DomainError("mie_coefficients: n_max must be at least 1");
  // The conjugated field belongs to the conjugated index.
  const Complex m = cfg.convention == MieConvention::conjugate_kernel ? std::conj(cfg.m) : cfg.m;
  const Complex x = cfg.k * cfg.a, mx = m * x;
  const auto jx = spherical_bessel_j_sequence(n_max, x);
  const auto hx = spherical_hankel1_sequence(n_max, x);
  const auto jmx = spherical_bessel_j_sequence(n_max, mx);
  const auto djx = riccati_derivative(jx, x);
  const auto dhx = riccati_derivative(hx, x);
  const auto djmx = riccati_derivative(jmx, mx);
  MieCoefficients out;
  out.c.assign(n_max + 1, 0.0);
  out.d.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    const Complex a1 = jmx[n] * dhx[n], a2 = hx[n] * djmx[n];
    const Complex den_c = a1 - a2;
    const Complex den_d = m * m * a1 - a2;
    const double scale = std::abs(a1) + std::abs(a2);
    if (!(std::abs(den_c) > 1e-14 * scale) || !(std::abs(den_d) > 1e-14 * scale)) {
      if (!std::isfinite(scale)) {  // h_n overflowed: the series is long converged
        out.c.resize(n);
        out.d.resize(n);
        return out;
      }
      throw DegeneracyError("mie_coefficients: vanishing denominator at n = " + std::to_string(n));
    }
    const Complex num = jx[n] * dhx[n] - hx[n] * djx[n];
    out.c[n] = num / den_c;
    out.d[n] = m * num / den_d;
  }
  return out;
}

namespace {

// Upper bound of the n-th term magnitude over the sphere (attained near r = a).
std::vector<double> term_bounds(const MieConfig& cfg, const MieCoefficients& co) {
  const int N = co.n_max();
  const Complex m = cfg.convention == MieConvention::conjugate_kernel ? std::conj(cfg.m) : cfg.m;
  const Complex rho = m * cfg.k * cfg.a;
  const auto j = spherical_bessel_j_sequence(N, rho);
  const auto dj = riccati_derivative(j, rho);
  std::vector<double> t(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    const double nn = n * (n + 1.0);
    t[n] = (2 * n + 1) * (std::abs(co.c[n] * j[n]) +
                          std::abs(co.d[n]) * (nn * std::abs(j[n] / rho) + std::abs(dj[n] / rho)));
  }
  return t;
}

}  // namespace

MieCoefficients mie_coefficients(const MieConfig& cfg) {
  if (cfg.n_max > 0) return mie_coefficients(cfg, cfg.n_max);
  const double x = cfg.k * cfg.a * std::max(1.0, std::abs(cfg.m));
  int n = std::max(20, static_cast<int>(x + 4.0 * std::cbrt(x) + 2.0));
  while (true) {
    MieCoefficients co = mie_coefficients(cfg, n);
    if (co.n_max() < n) return co;
    const auto t = term_bounds(cfg, co);
    if (t[n] <= 1e-12 * t[1] || n >= 200) return co;
    n = std::min(200, n + 10);
  }
}

CVec3 mie_interior_field(const MieConfig& cfg, const Vec3& point) {
  return mie_interior_field(cfg, mie_coefficients(cfg), point);
}

namespace {

CVec3 printed_field(const MieConfig& cfg, const MieCoefficients& co, const Vec3& p) {
  const int N = co.n_max();
  const double r = p.norm();
  const double rxy = std::hypot(p[0], p[1]);
  const double theta = r > 0 ? std::atan2(rxy, p[2]) : 0.0;
  const double phi = rxy > 0 ? std::atan2(p[1], p[0]) : 0.0;
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  const auto ang = angular_functions(ct, N);
  const Complex m = cfg.convention == MieConvention::conjugate_kernel ? std::conj(cfg.m) : cfg.m;
  const Complex rho = m * cfg.k * r;

  std::vector<Complex> j(N + 1, 0.0), j_over(N + 1, 0.0), dj_over(N + 1, 0.0);
  if (std::abs(rho) < 1e-8) {
    // leading order: j_1 / rho -> 1/3, [rho j_1]' / rho -> 2/3
    if (N >= 1) {
      j[1] = rho / 3.0;
      j_over[1] = 1.0 / 3.0;
      dj_over[1] = 2.0 / 3.0;
    }
  } else {
    j = spherical_bessel_j_sequence(N, rho);
    const auto dj = riccati_derivative(j, rho);
    for (int n = 1; n <= N; ++n) {
      j_over[n] = j[n] / rho;
      dj_over[n] = dj[n] / rho;
    }
  }

  Complex er = 0, et = 0, ep = 0;
  Complex in = 1.0;
  for (int n = 1; n <= N; ++n) {
    in *= kI;
    const double nn = n * (n + 1.0);
    const Complex En = in * (2.0 * n + 1.0) / nn;
    const Complex c = co.c[n], d = co.d[n];
    // c M_o1n - i d N_e1n
    er += En * (-kI * d * nn * cp * st * ang.pi[n] * j_over[n]);
    et += En * (c * cp * ang.pi[n] * j[n] - kI * d * cp * ang.tau[n] * dj_over[n]);
    ep += En * (-c * sp * ang.tau[n] * j[n] + kI * d * sp * ang.pi[n] * dj_over[n]);
  }
  const Vec3 ur(st * cp, st * sp, ct), ut(ct * cp, ct * sp, -st), up(-sp, cp, 0.0);
  return er * ur.cast<Complex>() + et * ut.cast<Complex>() + ep * up.cast<Complex>();
}

}  // namespace

CVec3 mie_interior_field(const MieConfig& cfg, const MieCoefficients& co, const Vec3& point) {
  if (point.norm() > cfg.a * (1.0 + 1e-12)) {
    throw DomainError("mie_interior_field: point outside the sphere");
  }
  if (cfg.convention == MieConvention::as_printed) return printed_field(cfg, co, point);
  const Vec3 mirrored(point[0], -point[1], -point[2]);
  const CVec3 e = printed_field(cfg, co, mirrored);
  return CVec3(std::conj(e[0]), -std::conj(e[1]), -std::conj(e[2]));
}

}  // namespace nvie

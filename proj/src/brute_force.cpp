#include "nvie/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvie/errors.hpp"
#include "nvie/quadrature.hpp"

namespace nvie {

double Domain::distance_to_boundary(const Vec3& x) const {
  if (shape == ReferenceShape::cube) return size - (x - center).cwiseAbs().maxCoeff();
  return size - (x - center).norm();
}

namespace {

constexpr int kComponents = 21;  // 3 scalar + 3 x 6 dyadic

struct Accumulator {
  int n;
  std::vector<double> acc;
  std::vector<double> fx;
  std::vector<double> fj;

  explicit Accumulator(int n_values) : n(n_values), acc(kComponents * n_values, 0.0), fx(n_values), fj(n_values) {}

  static void uu6(const Vec3& u, double* out) {
    out[0] = u[0] * u[0];
    out[1] = u[0] * u[1];
    out[2] = u[0] * u[2];
    out[3] = u[1] * u[1];
    out[4] = u[1] * u[2];
    out[5] = u[2] * u[2];
  }

  // Adds c[k] * value[v] (with the dyadic factor) for k = 0..2.
  void add(const double c[3], const double* values, const double uu[6]) {
    for (int v = 0; v < n; ++v) {
      double* a = &acc[kComponents * v];
      for (int k = 0; k < 3; ++k) {
        const double t = c[k] * values[v];
        a[k] += t;
        for (int q = 0; q < 6; ++q) a[3 + 6 * k + q] += t * uu[q];
      }
    }
  }

  // Scalar-k contribution with per-value coefficients (used for the k = 3 log term).
  void add_k(int k, double c, const double* values, const double uu[6]) {
    for (int v = 0; v < n; ++v) {
      double* a = &acc[kComponents * v];
      const double t = c * values[v];
      a[k] += t;
      for (int q = 0; q < 6; ++q) a[3 + 6 * k + q] += t * uu[q];
    }
  }
};

// Integrates along the ray r_j + R u, R in [delta, rho], with solid-angle weight d_omega.
void integrate_ray(const Vec3& r_j, const Vec3& u, double rho, double delta, double d_omega,
                   const QuadratureRule1D& rule, const MultiIntegrand& f, Accumulator& a) {
  double uu[6];
  Accumulator::uu6(u, uu);
  const double half = 0.5 * (rho - delta), mid = 0.5 * (rho + delta);
  std::vector<double> diff(a.n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double R = mid + half * rule.nodes[q];
    const double w = d_omega * half * rule.weights[q];
    f(r_j + R * u, a.fx.data());
    // k=1: R f, k=2: f, k=3: (f - f_j) / R
    const double c12[3] = {w * R, w, 0.0};
    a.add(c12, a.fx.data(), uu);
    for (int v = 0; v < a.n; ++v) diff[v] = a.fx[v] - a.fj[v];
    a.add_k(2, w / R, diff.data(), uu);
  }
  a.add_k(2, d_omega * std::log(rho / delta), a.fj.data(), uu);
}

void integrate_central_cube(const Vec3& r_j, double w, double delta, int N,
                            const MultiIntegrand& f, Accumulator& a) {
  const auto& g = gauss_legendre(N);
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    for (int sigma = -1; sigma <= 1; sigma += 2) {
      for (int i = 0; i < N; ++i)
        for (int l = 0; l < N; ++l) {
          Vec3 d;
          d[axis] = sigma * w;
          d[b] = w * g.nodes[i];
          d[c] = w * g.nodes[l];
          const double rho = d.norm();
          const double d_omega = w * w * w * g.weights[i] * g.weights[l] / (rho * rho * rho);
          integrate_ray(r_j, d / rho, rho, delta, d_omega, g, f, a);
        }
    }
  }
}

void integrate_box(const Vec3& lo, const Vec3& hi, const Vec3& r_j, int N,
                   const MultiIntegrand& f, Accumulator& a) {
  const auto& g = gauss_legendre(N);
  const Vec3 half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  const double jac = half.prod();
  double uu[6];
  for (int i = 0; i < N; ++i)
    for (int l = 0; l < N; ++l)
      for (int q = 0; q < N; ++q) {
        const Vec3 x = mid + Vec3(half[0] * g.nodes[i], half[1] * g.nodes[l], half[2] * g.nodes[q]);
        const double w = jac * g.weights[i] * g.weights[l] * g.weights[q];
        const Vec3 d = x - r_j;
        const double R = d.norm();
        Accumulator::uu6(d / R, uu);
        f(x, a.fx.data());
        const double c[3] = {w / R, w / (R * R), w / (R * R * R)};
        a.add(c, a.fx.data(), uu);
      }
}

void integrate_cube_domain(const Domain& dom, const Vec3& r_j, double delta, int N,
                           const MultiIntegrand& f, Accumulator& a) {
  const double w = dom.distance_to_boundary(r_j);
  integrate_central_cube(r_j, w, delta, N, f, a);
  std::array<std::array<double, 4>, 3> planes;
  for (int d = 0; d < 3; ++d) {
    planes[d] = {dom.center[d] - dom.size, r_j[d] - w, r_j[d] + w, dom.center[d] + dom.size};
  }
  const double eps = 1e-14 * dom.size;
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l)
      for (int q = 0; q < 3; ++q) {
        if (i == 1 && l == 1 && q == 1) continue;
        const Vec3 lo(planes[0][i], planes[1][l], planes[2][q]);
        const Vec3 hi(planes[0][i + 1], planes[1][l + 1], planes[2][q + 1]);
        if ((hi - lo).minCoeff() <= eps) continue;
        integrate_box(lo, hi, r_j, N, f, a);
      }
}

void integrate_ball_domain(const Domain& dom, const Vec3& r_j, double delta, int N,
                           const MultiIntegrand& f, Accumulator& a) {
  const Vec3 off = r_j - dom.center;
  const double d = off.norm();
  Vec3 e3 = d > 1e-14 * dom.size ? Vec3(off / d) : Vec3::UnitZ();
  Vec3 e1 = std::abs(e3[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (e1 - e1.dot(e3) * e3).normalized();
  const Vec3 e2 = e3.cross(e1);
  const auto& gt = gauss_legendre(N);
  const auto& gr = gauss_legendre(N);
  const int n_psi = 2 * N;
  const double a2 = dom.size * dom.size;
  for (int it = 0; it < N; ++it) {
    const double th = 0.5 * kPi * (gt.nodes[it] + 1.0);
    const double ct = std::cos(th), st = std::sin(th);
    const double s_max = -d * ct + std::sqrt(d * d * ct * ct + a2 - d * d);
    const double w_th = 0.5 * kPi * gt.weights[it] * st;
    for (int ip = 0; ip < n_psi; ++ip) {
      const double ps = 2.0 * kPi * ip / n_psi;
      const Vec3 u = st * (std::cos(ps) * e1 + std::sin(ps) * e2) + ct * e3;
      integrate_ray(r_j, u, s_max, delta, w_th * 2.0 * kPi / n_psi, gr, f, a);
    }
  }
}

std::vector<double> integrate_once(const Domain& dom, const Vec3& r_j, double delta, int n_values,
                                   const MultiIntegrand& f, int N) {
  Accumulator a(n_values);
  f(r_j, a.fj.data());
  if (dom.shape == ReferenceShape::cube) {
    integrate_cube_domain(dom, r_j, delta, N, f, a);
  } else {
    integrate_ball_domain(dom, r_j, delta, N, f, a);
  }
  return a.acc;
}

}  // namespace

std::vector<KernelMoments> brute_force_moments(const Domain& domain, const Vec3& r_j,
                                               double delta, int n_values,
                                               const MultiIntegrand& f,
                                               const BruteForceOptions& options) {
  if (!(delta > 0)) throw DomainError("brute_force_moments: delta must be positive");
  if (delta >= domain.distance_to_boundary(r_j)) {
    throw GeometryError("brute_force_moments: exclusion ball of radius " + std::to_string(delta) +
                        " leaves the domain");
  }
  int N = std::max(options.points, 2);
  std::vector<double> prev = integrate_once(domain, r_j, delta, n_values, f, N);
  double diff = 0;
  for (int it = 0; it <= options.max_doublings; ++it) {
    N *= 2;
    std::vector<double> cur = integrate_once(domain, r_j, delta, n_values, f, N);
    diff = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      diff = std::max(diff, std::abs(cur[i] - prev[i]) / std::max(1.0, std::abs(cur[i])));
    }
    prev = std::move(cur);
    if (diff <= options.tolerance) {
      std::vector<KernelMoments> out(n_values);
      for (int v = 0; v < n_values; ++v) {
        const double* c = &prev[kComponents * v];
        for (int k = 0; k < 3; ++k) {
          out[v].scalar[k] = c[k];
          const double* q = c + 3 + 6 * k;
          out[v].dyadic[k] << q[0], q[1], q[2], q[1], q[3], q[4], q[2], q[4], q[5];
        }
      }
      return out;
    }
  }
  throw AccuracyError("brute_force_moments: no agreement between successive refinements", diff);
}

KernelMoments brute_force_moments(const Domain& domain, const Vec3& r_j, double delta,
                                  const std::function<double(const Vec3&)>& f,
                                  const BruteForceOptions& options) {
  return brute_force_moments(
      domain, r_j, delta, 1, [&](const Vec3& x, double* out) { out[0] = f(x); }, options)[0];
}

RealDyadic brute_force_integral(const Domain& domain, const Vec3& r_j, double delta, int k,
                                KernelFactor h, const std::function<double(const Vec3&)>& f,
                                const BruteForceOptions& options) {
  if (k < 1 || k > 3) throw DomainError("brute_force_integral: k must be 1, 2 or 3");
  const auto m = brute_force_moments(domain, r_j, delta, f, options);
  if (h == KernelFactor::one) return m.scalar[k - 1] * RealDyadic::Identity();
  return m.dyadic[k - 1];
}

}  // namespace nvie

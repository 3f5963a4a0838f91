#include "nvie/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvie/quadrature.hpp"

namespace nvie {

const char* to_string(ReferenceShape shape) {
  return shape == ReferenceShape::cube ? "cube" : "sphere";
}

CollocationGrid CollocationGrid::cube(int p) {
  if (p < 2) throw InvalidOrderError("cube grid needs at least 2 points per direction");
  CollocationGrid g;
  g.shape_ = ReferenceShape::cube;
  g.params_ = {p, p, p};
  const auto& rule = gauss_legendre(p);
  g.axis_nodes_ = rule.nodes;
  g.nodes_.reserve(static_cast<std::size_t>(p) * p * p);
  g.regular_weights_.resize(p * p * p);
  for (int iz = 0; iz < p; ++iz)
    for (int iy = 0; iy < p; ++iy)
      for (int ix = 0; ix < p; ++ix) {
        g.nodes_.emplace_back(rule.nodes[ix], rule.nodes[iy], rule.nodes[iz]);
        g.regular_weights_[ix + p * (iy + p * iz)] =
            rule.weights[ix] * rule.weights[iy] * rule.weights[iz];
      }
  return g;
}

namespace {

// Cardinal function of trigonometric interpolation on n (even) equally spaced
// points of [0, 2 pi), with the Nyquist term halved.
double periodic_cardinal(int n, double a) {
  const int h = n / 2;
  double s = 1.0 + std::cos(h * a);
  for (int k = 1; k < h; ++k) s += 2.0 * std::cos(k * a);
  return s / n;
}

}  // namespace

CollocationGrid CollocationGrid::sphere(int m_r, int m_theta, int m_phi) {
  if (m_r < 1 || m_theta < 2 || m_phi < 1) {
    throw InvalidOrderError("sphere grid needs m_r >= 1, m_theta >= 2, m_phi >= 1");
  }
  CollocationGrid g;
  g.shape_ = ReferenceShape::sphere;
  g.params_ = {m_r, m_theta, m_phi};
  const auto radial = gauss_legendre(m_r, 0.0, 1.0);
  g.axis_nodes_ = radial.nodes;

  // Integrals of the 1-D cardinal functions; in theta with the sin weight and
  // the mirrored term folded in.
  std::vector<double> r_int(m_r, 0.0), t_int(m_theta + 1, 0.0), buf(m_r);
  const auto rq = gauss_legendre(m_r + 2, 0.0, 1.0);
  for (std::size_t q = 0; q < rq.size(); ++q) {
    lagrange_basis(g.axis_nodes_, rq.nodes[q], buf.data());
    for (int i = 0; i < m_r; ++i) r_int[i] += rq.weights[q] * rq.nodes[q] * rq.nodes[q] * buf[i];
  }
  const auto tq = gauss_legendre(4 * m_theta + 32, 0.0, kPi);
  for (std::size_t q = 0; q < tq.size(); ++q) {
    const double th = tq.nodes[q], w = tq.weights[q] * std::sin(th);
    t_int[0] += w * periodic_cardinal(2 * m_theta, th);
    t_int[m_theta] += w * periodic_cardinal(2 * m_theta, th - kPi);
    for (int l = 1; l < m_theta; ++l) {
      const double tl = l * kPi / m_theta;
      t_int[l] += w * (periodic_cardinal(2 * m_theta, th - tl) + periodic_cardinal(2 * m_theta, th + tl));
    }
  }
  const int n_phi = 2 * m_phi;
  const int per_shell = n_phi * (m_theta - 1) + 2;
  g.nodes_.reserve(static_cast<std::size_t>(m_r) * per_shell);
  g.regular_weights_.resize(m_r * per_shell);
  int idx = 0;
  for (int i = 0; i < m_r; ++i) {
    const double r = g.axis_nodes_[i];
    g.nodes_.emplace_back(0.0, 0.0, r);
    g.regular_weights_[idx++] = r_int[i] * t_int[0] * 2.0 * kPi;
    for (int l = 1; l < m_theta; ++l) {
      const double th = l * kPi / m_theta;
      for (int q = 0; q < n_phi; ++q) {
        const double ph = q * kPi / m_phi;
        g.nodes_.emplace_back(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                              r * std::cos(th));
        g.regular_weights_[idx++] = r_int[i] * t_int[l] * kPi / m_phi;
      }
    }
    g.nodes_.emplace_back(0.0, 0.0, -r);
    g.regular_weights_[idx++] = r_int[i] * t_int[m_theta] * 2.0 * kPi;
  }
  return g;
}

CollocationGrid CollocationGrid::make(ReferenceShape shape, const std::array<int, 3>& params) {
  if (shape == ReferenceShape::cube) {
    if (params[1] != params[0] || params[2] != params[0]) {
      throw InvalidOrderError("cube grid must use the same order in every direction");
    }
    return cube(params[0]);
  }
  return sphere(params[0], params[1], params[2]);
}

double CollocationGrid::effective_order() const { return std::cbrt(static_cast<double>(size())); }

double CollocationGrid::reference_volume() const {
  return shape_ == ReferenceShape::cube ? 8.0 : 4.0 * kPi / 3.0;
}

bool CollocationGrid::contains(const Vec3& x, double slack) const {
  if (shape_ == ReferenceShape::cube) return x.cwiseAbs().maxCoeff() <= 1.0 + slack;
  return x.norm() <= 1.0 + slack;
}

double CollocationGrid::distance_to_boundary(const Vec3& x) const {
  if (shape_ == ReferenceShape::cube) return 1.0 - x.cwiseAbs().maxCoeff();
  return 1.0 - x.norm();
}

double CollocationGrid::min_boundary_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) d = std::min(d, distance_to_boundary(n));
  return d;
}

void CollocationGrid::basis(const Vec3& x, double* out) const {
  if (shape_ == ReferenceShape::cube) {
    const int p = params_[0];
    double lx[64], ly[64], lz[64];
    std::vector<double> heap;
    double *px = lx, *py = ly, *pz = lz;
    if (p > 64) {
      heap.resize(3 * p);
      px = heap.data();
      py = px + p;
      pz = py + p;
    }
    lagrange_basis(axis_nodes_, x[0], px);
    lagrange_basis(axis_nodes_, x[1], py);
    lagrange_basis(axis_nodes_, x[2], pz);
    int idx = 0;
    for (int iz = 0; iz < p; ++iz)
      for (int iy = 0; iy < p; ++iy) {
        const double yz = py[iy] * pz[iz];
        for (int ix = 0; ix < p; ++ix) out[idx++] = px[ix] * yz;
      }
    return;
  }
  const double rho_xy = std::hypot(x[0], x[1]);
  const double r = std::hypot(rho_xy, x[2]);
  const double theta = std::atan2(rho_xy, x[2]);
  const double phi = std::atan2(x[1], x[0]);
  sphere_coordinates_basis(r, theta, phi, out);
}

Eigen::VectorXd CollocationGrid::basis(const Vec3& x) const {
  Eigen::VectorXd v(size());
  basis(x, v.data());
  return v;
}

void CollocationGrid::sphere_coordinates_basis(double r, double theta, double phi,
                                               double* out) const {
  const int m_r = params_[0], m_theta = params_[1], m_phi = params_[2];
  const int n_theta = 2 * m_theta, n_phi = 2 * m_phi;
  std::vector<double> lr(m_r), tp(m_theta + 1), tm(m_theta + 1), dq(n_phi);
  lagrange_basis(axis_nodes_, r, lr.data());
  for (int l = 0; l <= m_theta; ++l) {
    tp[l] = periodic_cardinal(n_theta, theta - l * kPi / m_theta);
    tm[l] = periodic_cardinal(n_theta, theta + l * kPi / m_theta);
  }
  for (int q = 0; q < n_phi; ++q) dq[q] = periodic_cardinal(n_phi, phi - q * kPi / m_phi);
  int idx = 0;
  for (int i = 0; i < m_r; ++i) {
    out[idx++] = lr[i] * tp[0];
    for (int l = 1; l < m_theta; ++l) {
      for (int q = 0; q < n_phi; ++q) {
        // (theta_l, phi_q) and its image (2 pi - theta_l, phi_q + pi) on the doubled sphere
        out[idx++] = lr[i] * (tp[l] * dq[q] + tm[l] * dq[(q + m_phi) % n_phi]);
      }
    }
    out[idx++] = lr[i] * tp[m_theta];
  }
}

}  // namespace nvie

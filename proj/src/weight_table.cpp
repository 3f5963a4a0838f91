#include "nvie/weight_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nvie/errors.hpp"
#include "nvie/quadrature.hpp"

namespace nvie {

RealDyadic WeightTable::lambda(int k, int j, int m) const {
  const auto& d = dyadic[k - 1];
  RealDyadic L;
  L << d[0](j, m), d[1](j, m), d[2](j, m), d[1](j, m), d[3](j, m), d[4](j, m), d[2](j, m),
      d[4](j, m), d[5](j, m);
  return L;
}

namespace {

// Per-node result: 7 x 3M, row 0 the scalar moments, rows 1..6 the dyadic
// components; column (k-1) * M + m.
using NodeRows = Eigen::MatrixXd;

using NodeList = std::vector<std::pair<double, double>>;

void append_gauss(double a, double b, const QuadratureRule1D& rule, NodeList& out) {
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (std::size_t q = 0; q < rule.size(); ++q)
    out.emplace_back(mid + half * rule.nodes[q], half * rule.weights[q]);
}

// x = a + w sinh(t) clusters nodes towards a feature of width w at a.
void append_graded(double a, double len, double w, double sign, const QuadratureRule1D& rule,
                   NodeList& out) {
  const double t_max = std::asinh(len / w);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = 0.5 * t_max * (rule.nodes[q] + 1.0);
    out.emplace_back(a + sign * w * std::sinh(t), 0.5 * t_max * rule.weights[q] * w * std::cosh(t));
  }
}

// Covers [a, a + len] (sign = 1) or [a - len, a] (sign = -1) with nodes
// clustered at a: x = a + sign len s^3 handles end point singularities of
// x^n log x type, and with a feature width w the map x = a + sign w sinh(T s^3)
// also resolves a near singularity of that width.
void append_end_graded(double a, double len, double w, double sign, const QuadratureRule1D& rule,
                       NodeList& out) {
  const bool spread = w > 0 && w < 0.5 * len;
  const double T = spread ? std::asinh(len / w) : 1.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = 0.5 * (rule.nodes[q] + 1.0);
    const double t = T * s * s * s, dt = 1.5 * T * s * s * rule.weights[q];
    if (spread)
      out.emplace_back(a + sign * w * std::sinh(t), w * std::cosh(t) * dt);
    else
      out.emplace_back(a + sign * len * t, len * dt);
  }
}

// Both halves of [a, b] graded towards their end points.
void append_two_sided(double a, double b, double w_a, double w_b, const QuadratureRule1D& rule,
                      NodeList& out) {
  if (b <= a) return;
  const double half = 0.5 * (b - a);
  append_end_graded(a, half, w_a, 1.0, rule, out);
  append_end_graded(b, half, w_b, -1.0, rule, out);
}

// Gauss on [a, b], graded towards either end whose feature width is small
// compared with the interval; a negative width means no feature.
void append_piece(double a, double b, double w_a, double w_b, const QuadratureRule1D& rule,
                  NodeList& out) {
  const double len = b - a;
  if (len <= 0) return;
  const bool ga = w_a > 1e-9 * len && w_a < 0.5 * len;
  const bool gb = w_b > 1e-9 * len && w_b < 0.5 * len;
  if (ga && gb) {
    const double c = 0.5 * (a + b);
    append_graded(a, c - a, w_a, 1.0, rule, out);
    append_graded(b, b - c, w_b, -1.0, rule, out);
  } else if (ga) {
    append_graded(a, len, w_a, 1.0, rule, out);
  } else if (gb) {
    append_graded(b, len, w_b, -1.0, rule, out);
  } else {
    append_gauss(a, b, rule, out);
  }
}

struct Feature {
  double R;
  double width;
};

class RayAccumulator {
 public:
  RayAccumulator(const CollocationGrid& grid, int j, double delta, int n_rad,
                 double start_width = -1)
      : grid_(grid), j_(j), delta_(delta), start_width_(start_width), M_(grid.size()),
        rule_(gauss_legendre(n_rad)),
        result_(NodeRows::Zero(7, 3 * M_)), W_(kBatch, 7), I_(kBatch, 3 * M_), phi_(M_) {}

  void add_ray(const Vec3& u, double rho, double d_omega) {
    nodes_.clear();
    append_gauss(delta_, rho, rule_, nodes_);
    accumulate(u, rho, d_omega);
  }

  // Near-singular points (R, width) of the basis along the ray: each one
  // splits the radial range and the pieces are graded towards it.
  void add_ray(const Vec3& u, double rho, double d_omega, std::vector<Feature> features) {
    nodes_.clear();
    std::erase_if(features, [&](const Feature& f) { return !(f.R > delta_ && f.R < rho); });
    if (features.empty()) {
      append_piece(delta_, rho, start_width_, -1, rule_, nodes_);
    } else {
      std::sort(features.begin(), features.end(),
                [](const Feature& a, const Feature& b) { return a.R < b.R; });
      double lo = delta_, w_lo = start_width_;
      for (const auto& f : features) {
        append_piece(lo, f.R, w_lo, f.width, rule_, nodes_);
        lo = f.R;
        w_lo = f.width;
      }
      append_piece(lo, rho, w_lo, -1, rule_, nodes_);
    }
    accumulate(u, rho, d_omega);
  }

  NodeRows finish() {
    flush();
    return result_;
  }

 private:
  static constexpr int kBatch = 256;

  void accumulate(const Vec3& u, double rho, double d_omega) {
    const Vec3& xi = grid_.node(j_);
    auto I = I_.row(fill_);
    I.setZero();
    double inv_sum = 0;
    for (const auto& [R, w] : nodes_) {
      grid_.basis(xi + R * u, phi_.data());
      I.segment(0, M_) += (w * R) * phi_.transpose();
      I.segment(M_, M_) += w * phi_.transpose();
      I.segment(2 * M_, M_) += (w / R) * phi_.transpose();
      inv_sum += w / R;
    }
    I(2 * M_ + j_) += std::log(rho / delta_) - inv_sum;
    W_(fill_, 0) = d_omega;
    W_(fill_, 1) = d_omega * u[0] * u[0];
    W_(fill_, 2) = d_omega * u[0] * u[1];
    W_(fill_, 3) = d_omega * u[0] * u[2];
    W_(fill_, 4) = d_omega * u[1] * u[1];
    W_(fill_, 5) = d_omega * u[1] * u[2];
    W_(fill_, 6) = d_omega * u[2] * u[2];
    if (++fill_ == kBatch) flush();
  }

  void flush() {
    if (fill_ == 0) return;
    result_.noalias() += W_.topRows(fill_).transpose() * I_.topRows(fill_);
    fill_ = 0;
  }

  const CollocationGrid& grid_;
  int j_;
  double delta_;
  double start_width_;
  int M_;
  const QuadratureRule1D& rule_;
  NodeRows result_;
  Eigen::MatrixXd W_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> I_;
  Eigen::VectorXd phi_;
  NodeList nodes_;
  int fill_ = 0;
};

// Each face is split at the foot of the perpendicular from the node into four
// rectangles and each rectangle into two right triangles. On a triangle with
// legs d1 (along e1) and d2 the in-face polar radius is s = h sinh t, which
// turns the solid-angle density h s / rho^3 into tanh t sech t.
NodeRows cube_node_rows(const CollocationGrid& grid, int j, double delta, int n_ang, int n_rad) {
  RayAccumulator acc(grid, j, delta, n_rad);
  const Vec3& xi = grid.node(j);
  const auto& g = gauss_legendre(n_ang);
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    for (int sigma = -1; sigma <= 1; sigma += 2) {
      const double h = 1.0 - sigma * xi[axis];
      for (int sb = -1; sb <= 1; sb += 2)
        for (int sc = -1; sc <= 1; sc += 2) {
          const double db = 1.0 - sb * xi[b], dc = 1.0 - sc * xi[c];
          for (int tri = 0; tri < 2; ++tri) {
            const double d1 = tri == 0 ? db : dc, d2 = tri == 0 ? dc : db;
            const int a1 = tri == 0 ? b : c, a2 = tri == 0 ? c : b;
            const int s1 = tri == 0 ? sb : sc, s2 = tri == 0 ? sc : sb;
            const double psi_max = std::atan2(d2, d1);
            for (int ip = 0; ip < n_ang; ++ip) {
              const double psi = 0.5 * psi_max * (g.nodes[ip] + 1.0);
              const double w_psi = 0.5 * psi_max * g.weights[ip];
              const double cp = std::cos(psi), sp = std::sin(psi);
              const double t_max = std::asinh(d1 / (cp * h));
              for (int it = 0; it < n_ang; ++it) {
                const double t = 0.5 * t_max * (g.nodes[it] + 1.0);
                const double w = w_psi * 0.5 * t_max * g.weights[it];
                const double s = h * std::sinh(t), ch = std::cosh(t);
                Vec3 d;
                d[axis] = sigma * h;
                d[a1] = s1 * s * cp;
                d[a2] = s2 * s * sp;
                const double rho = h * ch;
                acc.add_ray(d / rho, rho, w * std::tanh(t) / ch);
              }
            }
          }
        }
    }
  }
  return acc.finish();
}

// Polar axis towards the origin, where the basis is discontinuous, and psi
// measured from the plane through the node and the z-axis. The rays crossing
// the z-axis then lie in psi = 0 and psi = pi; pole nodes use the trapezoidal
// rule in psi. Along each ray the radial
// rule is graded towards the closest approach to the origin and to the axis,
// and towards the node on the scale of its distance to them.
NodeRows sphere_node_rows(const CollocationGrid& grid, int j, double delta, int n_ang,
                          int n_rad) {
  const Vec3& xi = grid.node(j);
  const double r2 = xi.squaredNorm(), c0 = 1.0 - r2;
  const double rxy = std::hypot(xi[0], xi[1]);
  const bool pole = rxy < 1e-12;
  RayAccumulator acc(grid, j, delta, n_rad,
                     0.5 * (pole ? std::sqrt(r2) : std::min(std::sqrt(r2), rxy)));
  const Vec3 e3 = -xi / std::sqrt(r2);
  const Vec3 e1 = pole ? Vec3::UnitX() : (Vec3::UnitZ() - e3[2] * e3).normalized();
  const Vec3 e2 = e3.cross(e1);
  const auto& rule = gauss_legendre(std::max(4, n_ang / 2));
  NodeList psi_rule, theta_rule;
  // Towards the origin the ray integrals behave like theta log theta and across
  // the z-axis like psi^2 log psi. Rays close to the z-axis direction sweep the
  // azimuth quickly, so the ring rules are also graded towards +z (psi = 0,
  // theta = theta_z) and -z (psi = pi, theta = pi - theta_z) on the scale of the
  // distance to the axis. Rays leaving through the poles of the sphere end on
  // the axis, which is a further kink in theta.
  if (!pole) {
    const double theta_z = std::acos(std::clamp(e3[2], -1.0, 1.0));
    const double width = rxy / std::max(std::sin(theta_z), 1e-3);
    append_two_sided(0.0, kPi, width, width, rule, psi_rule);
    append_two_sided(kPi, 2.0 * kPi, width, width, rule, psi_rule);
    std::vector<std::pair<double, double>> splits{{0.0, -1.0}, {theta_z, rxy}, {kPi - theta_z, rxy}};
    for (double zp : {-1.0, 1.0}) {
      const Vec3 d = (Vec3(0, 0, zp) - xi).normalized();
      splits.emplace_back(std::acos(std::clamp(d.dot(e3), -1.0, 1.0)), -1.0);
    }
    std::sort(splits.begin(), splits.end());
    for (std::size_t i = 0; i + 1 < splits.size(); ++i)
      append_two_sided(splits[i].first, splits[i + 1].first, splits[i].second,
                       splits[i + 1].second, rule, theta_rule);
    const auto [last, w_last] = splits.back();
    append_end_graded(last, 0.5 * (kPi - last), w_last, 1.0, rule, theta_rule);
    append_gauss(0.5 * (kPi + last), kPi, rule, theta_rule);
  } else {
    for (int ip = 0; ip < 2 * n_ang; ++ip) psi_rule.emplace_back(kPi * ip / n_ang, kPi / n_ang);
    append_end_graded(0.0, 0.5 * kPi, -1, 1.0, rule, theta_rule);
    append_gauss(0.5 * kPi, kPi, rule, theta_rule);
  }
  std::vector<Feature> features;
  for (const auto& [psi, w_psi] : psi_rule) {
    const Vec3 dir = std::cos(psi) * e1 + std::sin(psi) * e2;
    for (const auto& [th, w_th] : theta_rule) {
      const double st = std::sin(th);
      const Vec3 u = st * dir + std::cos(th) * e3;
      const double b = xi.dot(u);
      const double rho = -b + std::sqrt(b * b + c0);
      features.clear();
      features.push_back({-b, std::sqrt(std::max(r2 - b * b, 0.0))});
      const double uxy2 = u[0] * u[0] + u[1] * u[1];
      if (!pole && uxy2 > 1e-14) {
        const double Ra = -(xi[0] * u[0] + xi[1] * u[1]) / uxy2;
        features.push_back(
            {Ra, std::hypot(xi[0] + Ra * u[0], xi[1] + Ra * u[1]) / std::sqrt(uxy2)});
      }
      acc.add_ray(u, rho, w_psi * w_th * st, features);
    }
  }
  return acc.finish();
}

struct NodeSymmetry {
  int canonical = 0;
  RealDyadic Q = RealDyadic::Identity();  // node_j = Q node_canonical
};

std::vector<NodeSymmetry> node_symmetries(const CollocationGrid& grid) {
  const int M = grid.size();
  std::vector<NodeSymmetry> out(M);
  if (grid.shape() == ReferenceShape::cube) {
    for (int j = 0; j < M; ++j) {
      const Vec3& x = grid.node(j);
      std::array<int, 3> o{0, 1, 2};
      std::stable_sort(o.begin(), o.end(),
                       [&](int a, int b) { return std::abs(x[a]) > std::abs(x[b]); });
      RealDyadic Q = RealDyadic::Zero();
      Vec3 c;
      for (int t = 0; t < 3; ++t) {
        c[t] = std::abs(x[o[t]]);
        Q(o[t], t) = x[o[t]] < 0 ? -1.0 : 1.0;
      }
      out[j].Q = Q;
      out[j].canonical = -1;
      for (int m = 0; m < M; ++m) {
        if ((grid.node(m) - c).norm() < 1e-12) out[j].canonical = m;
      }
    }
  } else {
    const int m_theta = grid.params()[1], m_phi = grid.params()[2];
    const int n_phi = 2 * m_phi;
    const int per_shell = n_phi * (m_theta - 1) + 2;
    for (int j = 0; j < M; ++j) {
      const int shell = j / per_shell, loc = j % per_shell;
      const int base = shell * per_shell;
      RealDyadic F = RealDyadic::Identity();
      if (loc == 0) {
        out[j].canonical = base;
      } else if (loc == per_shell - 1) {
        out[j].canonical = base;
        F(2, 2) = -1;
      } else {
        const int l = 1 + (loc - 1) / n_phi, q = (loc - 1) % n_phi;
        const int lc = std::min(l, m_theta - l);
        if (l != lc) F(2, 2) = -1;
        const double a = q * kPi / m_phi;
        RealDyadic Rz;
        Rz << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
        F = Rz * F;
        out[j].canonical = base + 1 + (lc - 1) * n_phi;
      }
      out[j].Q = F;
    }
  }
  for (int j = 0; j < M; ++j) {
    if (out[j].canonical < 0 ||
        (out[j].Q * grid.node(out[j].canonical) - grid.node(j)).norm() > 1e-10) {
      throw Error("weight table: inconsistent node symmetry");
    }
  }
  return out;
}

std::vector<int> node_permutation(const CollocationGrid& grid, const RealDyadic& Q) {
  const int M = grid.size();
  std::map<std::array<long long, 3>, int> lookup;
  auto key = [](const Vec3& x) {
    return std::array<long long, 3>{std::llround(x[0] * 1e9), std::llround(x[1] * 1e9),
                                    std::llround(x[2] * 1e9)};
  };
  for (int m = 0; m < M; ++m) lookup.emplace(key(grid.node(m)), m);
  std::vector<int> perm(M);
  for (int m = 0; m < M; ++m) {
    const auto it = lookup.find(key(Q * grid.node(m)));
    if (it == lookup.end()) throw Error("weight table: grid not invariant under node symmetry");
    perm[m] = it->second;
  }
  return perm;
}

NodeRows node_rows(const CollocationGrid& grid, int j, double delta, int n_ang, int n_rad) {
  return grid.shape() == ReferenceShape::cube ? cube_node_rows(grid, j, delta, n_ang, n_rad)
                                              : sphere_node_rows(grid, j, delta, n_ang, n_rad);
}

double max_relative_difference(const NodeRows& a, const NodeRows& b) {
  return ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff();
}

}  // namespace

WeightTable compute_weight_table(const CollocationGrid& grid, double delta,
                                 const WeightTableOptions& options) {
  if (!(delta > 0)) throw DomainError("compute_weight_table: delta must be positive");
  if (delta >= grid.min_boundary_distance()) {
    throw GeometryError("compute_weight_table: exclusion ball of radius " + std::to_string(delta) +
                        " reaches the boundary of the reference domain");
  }
  const bool cube = grid.shape() == ReferenceShape::cube;
  const int M = grid.size();
  int n_ang = options.angular_points;
  if (n_ang <= 0) n_ang = cube ? 16 : 16 * std::max({3, grid.params()[1], grid.params()[2]});
  int n_rad = options.radial_points;
  if (n_rad <= 0) n_rad = cube ? (3 * grid.params()[0]) / 2 + 1 : 24;

  const auto sym = node_symmetries(grid);
  std::vector<int> canon;
  for (int j = 0; j < M; ++j)
    if (sym[j].canonical == j) canon.push_back(j);
  const int nc = static_cast<int>(canon.size());

  std::vector<NodeRows> rows(nc);
  double worst = 0;
  bool ok = true;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
  for (int c = 0; c < nc; ++c) {
    int na = n_ang, nr = n_rad;
    NodeRows cur = node_rows(grid, canon[c], delta, na, nr);
    if (options.certify) {
      double diff = 0;
      for (int it = 0; it <= options.max_doublings; ++it) {
        na *= 2;
        NodeRows fine = node_rows(grid, canon[c], delta, na, nr);
        diff = max_relative_difference(cur, fine);
        cur = std::move(fine);
        if (diff <= options.tolerance) break;
      }
      worst = std::max(worst, diff);
    }
    rows[c] = std::move(cur);
  }
  if (options.certify && worst > options.tolerance) ok = false;
  if (!ok) {
    throw AccuracyError("compute_weight_table: refinement did not reach the tolerance", worst);
  }

  WeightTable t;
  t.shape = grid.shape();
  t.grid_params = grid.params();
  t.delta = delta;
  for (int k = 0; k < 3; ++k) {
    t.scalar[k] = Eigen::MatrixXd::Zero(M, M);
    for (auto& d : t.dyadic[k]) d = Eigen::MatrixXd::Zero(M, M);
  }
  std::vector<int> row_of(M, -1);
  for (int c = 0; c < nc; ++c) row_of[canon[c]] = c;
  for (int j = 0; j < M; ++j) {
    const RealDyadic& Q = sym[j].Q;
    const NodeRows& r = rows[row_of[sym[j].canonical]];
    const auto perm = node_permutation(grid, Q);
    for (int m = 0; m < M; ++m) {
      const int gm = perm[m];
      for (int k = 0; k < 3; ++k) {
        const int col = k * M + m;
        t.scalar[k](j, gm) = r(0, col);
        RealDyadic L;
        L << r(1, col), r(2, col), r(3, col), r(2, col), r(4, col), r(5, col), r(3, col),
            r(5, col), r(6, col);
        L = Q * L * Q.transpose();
        t.dyadic[k][0](j, gm) = L(0, 0);
        t.dyadic[k][1](j, gm) = L(0, 1);
        t.dyadic[k][2](j, gm) = L(0, 2);
        t.dyadic[k][3](j, gm) = L(1, 1);
        t.dyadic[k][4](j, gm) = L(1, 2);
        t.dyadic[k][5](j, gm) = L(2, 2);
      }
    }
  }
  return t;
}

double reference_scale(ReferenceShape shape, double a) {
  if (!(a > 0)) throw DomainError("reference_scale: element size must be positive");
  return shape == ReferenceShape::cube ? 0.5 * a : a;
}

WeightTable rescale_weights(const WeightTable& table, double a) {
  const double s = reference_scale(table.shape, a);
  WeightTable out = table;
  for (int k = 0; k < 3; ++k) {
    const double f = std::pow(s, -(k + 1));
    out.scalar[k] *= f;
    for (auto& d : out.dyadic[k]) d *= f;
  }
  return out;
}

RealDyadic eval_sample_integral(const WeightTable& table, const CollocationGrid& grid, int j) {
  if (grid.shape() != table.shape || grid.params() != table.grid_params) {
    throw DomainError("eval_sample_integral: grid does not match the table");
  }
  RealDyadic G = RealDyadic::Zero();
  for (int m = 0; m < table.size(); ++m) {
    const double c = std::cos((grid.node(m) - grid.node(j)).norm());
    const double w = table.omega(1, j, m) + table.omega(2, j, m) + table.omega(3, j, m);
    G += c * (w * RealDyadic::Identity() - table.lambda(1, j, m) - 3.0 * table.lambda(2, j, m) -
              3.0 * table.lambda(3, j, m));
  }
  return G;
}

namespace {

constexpr char kMagic[4] = {'V', 'I', 'E', 'W'};
constexpr std::uint32_t kVersion = 2;

template <typename T>
void put(std::ostream& os, T v) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits;
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T))) {
    throw FormatError("weight table: unexpected end of file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void save_table(const WeightTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(table.shape));
  const int M = table.size();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(M));
  put<double>(os, table.delta);
  for (int p : table.grid_params) put<std::uint32_t>(os, static_cast<std::uint32_t>(p));
  for (int j = 0; j < M; ++j)
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) put<double>(os, table.scalar[k](j, m));
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 6; ++c) put<double>(os, table.dyadic[k][c](j, m));
    }
  if (!os) throw FormatError("write error on " + path.string());
}

WeightTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw FormatError(path.string() + ": not a weight table");
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const auto shape = get<std::uint8_t>(is);
  if (shape > 1) throw FormatError(path.string() + ": unknown reference shape");
  WeightTable t;
  t.shape = static_cast<ReferenceShape>(shape);
  const auto M = static_cast<int>(get<std::uint32_t>(is));
  t.delta = get<double>(is);
  for (int& p : t.grid_params) p = static_cast<int>(get<std::uint32_t>(is));
  const int expected = t.shape == ReferenceShape::cube
                           ? t.grid_params[0] * t.grid_params[1] * t.grid_params[2]
                           : t.grid_params[0] * (2 * t.grid_params[2] * (t.grid_params[1] - 1) + 2);
  if (M != expected || M <= 0) throw FormatError(path.string() + ": node count mismatch");
  for (int k = 0; k < 3; ++k) {
    t.scalar[k].resize(M, M);
    for (auto& d : t.dyadic[k]) d.resize(M, M);
  }
  for (int j = 0; j < M; ++j)
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) t.scalar[k](j, m) = get<double>(is);
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 6; ++c) t.dyadic[k][c](j, m) = get<double>(is);
    }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError(path.string() + ": trailing data");
  }
  return t;
}

void write_table_csv(const WeightTable& table, std::ostream& out) {
  static const char* comp[6] = {"xx", "xy", "xz", "yy", "yz", "zz"};
  out << "j,m,omega1,omega2,omega3";
  for (int k = 1; k <= 3; ++k)
    for (const char* c : comp) out << ",lambda" << k << "_" << c;
  out << '\n';
  char buf[32];
  for (int j = 0; j < table.size(); ++j)
    for (int m = 0; m < table.size(); ++m) {
      out << j << ',' << m;
      for (int k = 0; k < 3; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", table.scalar[k](j, m));
        out << ',' << buf;
      }
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 6; ++c) {
          std::snprintf(buf, sizeof buf, "%.17g", table.dyadic[k][c](j, m));
          out << ',' << buf;
        }
      out << '\n';
    }
}

WeightTable cached_weight_table(const CollocationGrid& grid, double delta,
                                const std::filesystem::path& cache_dir,
                                const WeightTableOptions& options) {
  char name[96];
  std::snprintf(name, sizeof name, "%s_%d_%d_%d_%.9e.view", to_string(grid.shape()),
                grid.params()[0], grid.params()[1], grid.params()[2], delta);
  const auto path = cache_dir / name;
  if (std::filesystem::exists(path)) {
    try {
      WeightTable t = load_table(path);
      if (t.shape == grid.shape() && t.grid_params == grid.params() && t.delta == delta) return t;
    } catch (const FormatError&) {
    }
  }
  WeightTable t = compute_weight_table(grid, delta, options);
  std::filesystem::create_directories(cache_dir);
  const auto tmp = path.string() + ".tmp";
  save_table(t, tmp);
  std::filesystem::rename(tmp, path);
  return t;
}

}  // namespace nvie

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "nvie/brute_force.hpp"
#include "nvie/grid.hpp"
#include "nvie/quadrature.hpp"
#include "nvie/weight_table.hpp"

using namespace nvie;

namespace {

const CollocationGrid& cube3() {
  static const CollocationGrid g = CollocationGrid::cube(3);
  return g;
}

// Tables are shared between tests; the p = 3 cube takes a few seconds each.
const WeightTable& cube3_table(double delta) {
  static std::map<double, WeightTable> cache;
  auto it = cache.find(delta);
  if (it == cache.end()) it = cache.emplace(delta, compute_weight_table(cube3(), delta)).first;
  return it->second;
}

int node_at(const CollocationGrid& g, const Vec3& x) {
  for (int j = 0; j < g.size(); ++j)
    if ((g.node(j) - x).norm() < 1e-12) return j;
  return -1;
}

Vec3 random_in_ball(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  while (true) {
    Vec3 x(u(rng), u(rng), u(rng));
    if (x.norm() < 0.98) return x;
  }
}

// Sample integrand of the validation tables, built from brute-force moments.
RealDyadic sample_kernel(const KernelMoments& mo) {
  return (mo.scalar[0] + mo.scalar[1] + mo.scalar[2]) * RealDyadic::Identity() - mo.dyadic[0] -
         3.0 * mo.dyadic[1] - 3.0 * mo.dyadic[2];
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(GaussLegendre, WeightsAndExactness) {
  for (int n : {1, 2, 5, 12, 40}) {
    const auto& r = gauss_legendre(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 2.0, 1e-14);
    EXPECT_TRUE(std::is_sorted(r.nodes.begin(), r.nodes.end()));
    const int deg = 2 * n - 2;  // even degree 2n-2 is integrated exactly
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    EXPECT_NEAR(s, 2.0 / (deg + 1), 1e-14);
  }
  const auto m = gauss_legendre(4, 1.0, 3.0);
  double s = 0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weights[i] * m.nodes[i] * m.nodes[i] * m.nodes[i];
  EXPECT_NEAR(s, (81.0 - 1.0) / 4.0, 1e-12);
}

TEST(LagrangeBasis, Cardinal) {
  const auto& r = gauss_legendre(5);
  std::vector<double> out(5);
  for (int i = 0; i < 5; ++i) {
    lagrange_basis(r.nodes, r.nodes[i], out.data());
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(out[j], i == j ? 1.0 : 0.0, 1e-14);
  }
}

TEST(CubeGrid, Counts) {
  EXPECT_EQ(cube3().size(), 27);
  EXPECT_GE(node_at(cube3(), Vec3::Zero()), 0);
  EXPECT_EQ(CollocationGrid::cube(7).size(), 343);
  EXPECT_THROW(CollocationGrid::cube(1), InvalidOrderError);
  for (const auto& x : CollocationGrid::cube(6).nodes()) EXPECT_LT(x.cwiseAbs().maxCoeff(), 1.0);
}

TEST(SphereGrid, Counts) {
  const auto g = CollocationGrid::sphere(3, 3, 3);
  EXPECT_EQ(g.size(), 42);
  EXPECT_NEAR(g.effective_order(), std::cbrt(42.0), 1e-14);
  for (int mr : {1, 2, 4})
    for (int mt : {2, 3, 5})
      for (int mp : {1, 2, 4})
        EXPECT_EQ(CollocationGrid::sphere(mr, mt, mp).size(), mr * (2 * mp * (mt - 1) + 2));
  for (const auto& x : g.nodes()) EXPECT_LT(x.norm(), 1.0);
  EXPECT_THROW(CollocationGrid::sphere(0, 3, 3), InvalidOrderError);
  EXPECT_THROW(CollocationGrid::sphere(3, 1, 3), InvalidOrderError);
  EXPECT_THROW(CollocationGrid::sphere(3, 3, 0), InvalidOrderError);
}

TEST(Grids, CardinalBasisAndPartitionOfUnity) {
  std::mt19937 rng(1);
  for (const auto& g : {CollocationGrid::cube(3), CollocationGrid::cube(5),
                        CollocationGrid::sphere(3, 3, 3), CollocationGrid::sphere(2, 4, 3)}) {
    for (int m = 0; m < g.size(); ++m) {
      const Eigen::VectorXd phi = g.basis(g.node(m));
      for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(phi[j], j == m ? 1.0 : 0.0, 1e-12);
    }
    for (int t = 0; t < 10; ++t) EXPECT_NEAR(g.basis(random_in_ball(rng)).sum(), 1.0, 1e-12);
  }
}

TEST(Interpolate, CubePolynomialExact) {
  std::vector<double> v;
  for (const auto& x : cube3().nodes()) v.push_back(x[0] * x[0] * x[1]);
  std::mt19937 rng(2);
  for (int t = 0; t < 5; ++t) {
    const Vec3 x = random_in_ball(rng);
    EXPECT_NEAR(interpolate(cube3(), v, x), x[0] * x[0] * x[1], 1e-13);
  }
  EXPECT_THROW(interpolate(cube3(), v, Vec3(1.2, 0, 0)), DomainError);
}

TEST(Interpolate, SphereRefinesInAngle) {
  const auto f = [](const Vec3& x) { return std::exp(0.4 * x[0]) * std::cos(0.7 * x[1] + 0.3 * x[2]); };
  std::mt19937 rng(4);
  std::vector<Vec3> pts;
  for (int t = 0; t < 50; ++t) pts.push_back(random_in_ball(rng));
  const auto err = [&](const CollocationGrid& g) {
    std::vector<double> v;
    for (const auto& x : g.nodes()) v.push_back(f(x));
    double e = 0;
    for (const auto& x : pts) e = std::max(e, std::abs(interpolate(g, v, x) - f(x)));
    return e;
  };
  const double coarse = err(CollocationGrid::sphere(8, 3, 3));
  const double fine = err(CollocationGrid::sphere(8, 6, 6));
  EXPECT_LT(fine, 0.1 * coarse);
}

TEST(Grids, RegularWeights) {
  const auto& w = cube3().regular_weights();
  EXPECT_NEAR(w.sum(), 8.0, 1e-13);
  double s = 0;
  for (int m = 0; m < cube3().size(); ++m) s += w[m] * std::pow(cube3().node(m)[0], 4);
  EXPECT_NEAR(s, 4.0 * 2.0 / 5.0, 1e-13);
  const auto g = CollocationGrid::sphere(4, 5, 4);
  EXPECT_NEAR(g.regular_weights().sum(), 4.0 * kPi / 3.0, 1e-12);
  double z2 = 0;
  for (int m = 0; m < g.size(); ++m) z2 += g.regular_weights()[m] * std::pow(g.node(m)[2], 2);
  EXPECT_NEAR(z2, 4.0 * kPi / 15.0, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(BruteForce, BallClosedForms) {
  const Domain ball = Domain::reference(ReferenceShape::sphere);
  const double d = 0.1;
  const auto mo = brute_force_moments(ball, Vec3::Zero(), d, [](const Vec3&) { return 1.0; });
  EXPECT_NEAR(mo.scalar[0] / (4 * kPi), (1 - d * d) / 2, 1e-10);
  EXPECT_NEAR(mo.scalar[0] / (4 * kPi), 0.495, 1e-10);
  EXPECT_NEAR(mo.scalar[1], 4 * kPi * (1 - d), 1e-9);
  EXPECT_NEAR(mo.scalar[2], 4 * kPi * std::log(1 / d), 1e-9);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(mo.dyadic[k].trace(), mo.scalar[k], 1e-9);
    EXPECT_LT((mo.dyadic[k] - mo.scalar[k] / 3 * RealDyadic::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(BruteForce, CubeFromSubcubes) {
  // 1/R over [-1,1]^3 minus a ball about an off-centre point, against the
  // same integral split as a tensor rule on the whole cube minus the ball.
  const Vec3 x(0.2, -0.1, 0.3);
  const double d = 0.05;
  const auto mo = brute_force_moments(Domain::reference(ReferenceShape::cube), x, d,
                                      [](const Vec3&) { return 1.0; }, BruteForceOptions{32, 1e-10, 3});
  // cube without the ball: graded Gauss on the cube of 1/R (integrable) minus 2 pi d^2
  const auto r = gauss_legendre(64);
  double s = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        // the eight boxes with a corner at x
        const Vec3 lo(a ? x[0] : -1, b ? x[1] : -1, c ? x[2] : -1);
        const Vec3 hi(a ? 1 : x[0], b ? 1 : x[1], c ? 1 : x[2]);
        for (std::size_t i = 0; i < r.size(); ++i)
          for (std::size_t j = 0; j < r.size(); ++j)
            for (std::size_t k = 0; k < r.size(); ++k) {
              // cubic grading toward the corner at x removes the 1/R singularity
              Vec3 t(r.nodes[i], r.nodes[j], r.nodes[k]);
              Vec3 p, jac;
              for (int q = 0; q < 3; ++q) {
                const double u = (t[q] + 1) / 2, len = hi[q] - lo[q];
                const bool at_lo = (q == 0 ? a : q == 1 ? b : c) != 0;
                const double g = u * u * u;
                p[q] = at_lo ? lo[q] + len * g : hi[q] - len * g;
                jac[q] = len * 3 * u * u / 2;
              }
              s += r.weights[i] * r.weights[j] * r.weights[k] * jac.prod() / (p - x).norm();
            }
      }
  EXPECT_NEAR(mo.scalar[0], s - 2 * kPi * d * d, 1e-8);
}

TEST(BruteForce, SampleIntegralAtCentre) {
  // the reference integrates the 27-node interpolant of cos|y - r_j|
  const Vec3 o = Vec3::Zero();
  std::vector<double> c;
  for (const auto& x : cube3().nodes()) c.push_back(std::cos((x - o).norm()));
  const auto mo = brute_force_moments(Domain::reference(ReferenceShape::cube), o, 1e-3,
                                      [&](const Vec3& y) { return cube3().basis(y).dot(
                                          Eigen::Map<const Eigen::VectorXd>(c.data(), c.size())); },
                                      BruteForceOptions{32, 1e-9, 3});
  const RealDyadic G = sample_kernel(mo);
  EXPECT_NEAR(G(0, 0), 4.027477, 1e-5);
  EXPECT_NEAR(G(1, 1), G(0, 0), 1e-9);
  EXPECT_NEAR(G(0, 1), 0.0, 1e-9);
}

TEST(BruteForce, Errors) {
  const Domain cube = Domain::reference(ReferenceShape::cube);
  const auto one = [](const Vec3&) { return 1.0; };
  EXPECT_THROW(brute_force_moments(cube, Vec3(0.95, 0, 0), 0.1, one), GeometryError);
  EXPECT_THROW(brute_force_integral(cube, Vec3::Zero(), 0.1, 4, KernelFactor::one, one), DomainError);
}

// ---------------------------------------------------------------------------

TEST(WeightTable, SampleIntegralChains) {
  const int centre = node_at(cube3(), Vec3::Zero());
  const RealDyadic g = eval_sample_integral(cube3_table(0.1), cube3(), centre);
  EXPECT_NEAR(g(0, 0), 3.985701, 1e-6);
  EXPECT_NEAR(g(1, 1), g(0, 0), 1e-12);
  EXPECT_NEAR(g(2, 2), g(0, 0), 1e-12);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(g(1, 2), 0.0, 1e-12);
  EXPECT_NEAR(eval_sample_integral(cube3_table(0.05), cube3(), centre)(0, 0), 4.017024, 1e-6);
  EXPECT_NEAR(eval_sample_integral(cube3_table(0.0125), cube3(), centre)(0, 0), 4.026835, 1e-6);
}

TEST(WeightTable, AnisotropicNodesMatchDirectIntegration) {
  // the interpolated integrand is integrated directly at the same delta
  const double s = std::sqrt(0.6);
  for (const Vec3& x : {Vec3(s, s, s), Vec3(0, s, s), Vec3(0, 0, s)}) {
    const int j = node_at(cube3(), x);
    ASSERT_GE(j, 0);
    Eigen::VectorXd fm(cube3().size());
    for (int m = 0; m < cube3().size(); ++m) fm[m] = std::cos((cube3().node(m) - x).norm());
    const auto mo = brute_force_moments(Domain::reference(ReferenceShape::cube), x, 0.025,
                                        [&](const Vec3& y) { return cube3().basis(y).dot(fm); },
                                        BruteForceOptions{32, 1e-9, 3});
    const RealDyadic ref = sample_kernel(mo);
    const RealDyadic got = eval_sample_integral(cube3_table(0.025), cube3(), j);
    EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-6) << x.transpose();
  }
}

TEST(WeightTable, ReproducesPolynomialMoments) {
  const WeightTable& t = cube3_table(0.05);
  const auto f = [](const Vec3& y) { return 1.0 + y[0] * y[0] * y[1] - 0.5 * y[2]; };
  for (int j : {0, 5, 13, 22}) {
    const Vec3 x = cube3().node(j);
    const auto mo = brute_force_moments(Domain::reference(ReferenceShape::cube), x, 0.05, f,
                                        BruteForceOptions{32, 1e-9, 3});
    for (int k = 1; k <= 3; ++k) {
      double s = 0;
      RealDyadic d = RealDyadic::Zero();
      for (int m = 0; m < t.size(); ++m) {
        s += f(cube3().node(m)) * t.omega(k, j, m);
        d += f(cube3().node(m)) * t.lambda(k, j, m);
      }
      EXPECT_NEAR(s, mo.scalar[k - 1], 1e-7) << "j " << j << " k " << k;
      EXPECT_LT((d - mo.dyadic[k - 1]).cwiseAbs().maxCoeff(), 1e-7) << "j " << j << " k " << k;
    }
  }
}

TEST(WeightTable, DyadicWeightsSymmetric) {
  const WeightTable& t = cube3_table(0.1);
  for (int k = 1; k <= 3; ++k) {
    const RealDyadic L = t.lambda(k, 3, 7);
    EXPECT_EQ((L - L.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(WeightTable, SphereConstantMoments) {
  const auto g = CollocationGrid::sphere(2, 3, 2);
  const double delta = 1e-3;
  const WeightTable t = compute_weight_table(g, delta);
  const Domain ball = Domain::reference(ReferenceShape::sphere);
  for (int j : {0, 3, g.size() - 1}) {
    const auto mo = brute_force_moments(ball, g.node(j), delta, [](const Vec3&) { return 1.0; },
                                        BruteForceOptions{32, 1e-9, 3});
    for (int k = 1; k <= 3; ++k) {
      double s = 0;
      RealDyadic d = RealDyadic::Zero();
      for (int m = 0; m < t.size(); ++m) {
        s += t.omega(k, j, m);
        d += t.lambda(k, j, m);
      }
      EXPECT_NEAR(s, mo.scalar[k - 1], 1e-6 * std::abs(mo.scalar[k - 1])) << "j " << j << " k " << k;
      EXPECT_LT((d - mo.dyadic[k - 1]).cwiseAbs().maxCoeff(), 1e-6 * std::abs(mo.scalar[k - 1]));
    }
  }
}

TEST(WeightTable, RejectsLargeBall) {
  EXPECT_THROW(compute_weight_table(cube3(), 0.3), GeometryError);
}

TEST(WeightTable, Rescale) {
  const WeightTable& t = cube3_table(0.1);
  const WeightTable same = rescale_weights(t, 2.0);
  for (int k = 0; k < 3; ++k) EXPECT_EQ((same.scalar[k] - t.scalar[k]).cwiseAbs().maxCoeff(), 0.0);
  const WeightTable small = rescale_weights(t, 0.5);
  EXPECT_NEAR(small.omega(3, 4, 9), 64.0 * t.omega(3, 4, 9), 1e-12 * std::abs(t.omega(3, 4, 9)));
  EXPECT_NEAR(small.omega(1, 4, 9), 4.0 * t.omega(1, 4, 9), 1e-12 * std::abs(t.omega(1, 4, 9)));
  EXPECT_THROW(rescale_weights(t, 0.0), DomainError);
}

TEST(WeightTable, RescaledMatchesPhysicalCube) {
  // side 0.5 centred at c: J sum_m omega'_3(j, m) against the physical integral
  const double a = 0.5, delta = 0.1;
  const Vec3 c(1.0, -2.0, 0.5);
  const WeightTable t = rescale_weights(cube3_table(delta), a);
  const double J = std::pow(a / 2, 3);
  const int j = 5;
  const Vec3 x = c + (a / 2) * cube3().node(j);
  for (int k = 1; k <= 3; ++k) {
    const RealDyadic ref = brute_force_integral(Domain{ReferenceShape::cube, c, a / 2}, x, a / 2 * delta, k,
                                                KernelFactor::one, [](const Vec3&) { return 1.0; },
                                                BruteForceOptions{32, 1e-10, 3});
    double s = 0;
    for (int m = 0; m < t.size(); ++m) s += J * t.omega(k, j, m);
    EXPECT_NEAR(s, ref(0, 0), 1e-6) << "k " << k;
  }
}

TEST(WeightTable, FileRoundTrip) {
  const WeightTable& t = cube3_table(0.1);
  const auto dir = std::filesystem::temp_directory_path() / "nvie_test_tables";
  std::filesystem::create_directories(dir);
  const auto path = dir / "cube3.view";
  save_table(t, path);
  const WeightTable u = load_table(path);
  EXPECT_EQ(u.shape, t.shape);
  EXPECT_EQ(u.grid_params, t.grid_params);
  EXPECT_EQ(u.delta, t.delta);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(std::memcmp(u.scalar[k].data(), t.scalar[k].data(), sizeof(double) * t.scalar[k].size()), 0);
    for (int c = 0; c < 6; ++c)
      EXPECT_EQ(std::memcmp(u.dyadic[k][c].data(), t.dyadic[k][c].data(),
                            sizeof(double) * t.dyadic[k][c].size()),
                0);
  }
  EXPECT_NEAR(eval_sample_integral(u, cube3(), node_at(cube3(), Vec3::Zero()))(0, 0), 3.985701, 1e-6);

  const auto bad = dir / "bad.view";
  {
    std::ofstream os(bad, std::ios::binary);
    os << "WEIV and some bytes";
  }
  EXPECT_THROW(load_table(bad), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(WeightTable, CsvExportHasOneRowPerPair) {
  std::ostringstream os;
  write_table_csv(cube3_table(0.1), os);
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 27 * 27);
}

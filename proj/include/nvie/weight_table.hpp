#pragma once

// Precomputed singular quadrature weights on a reference domain.
//
// For every collocation node j (exclusion ball of radius delta about node j)
// and every basis function phi_m:
//   omega_k(j, m)  = int_{D \ B} phi_m / R^k dV
//   Lambda_k(j, m) = int_{D \ B} phi_m uu / R^k dV,     k = 1, 2, 3,
// where for k = 3 the ball term is regularised by subtracting phi_m(r_j)
// (the tables hold the finite part with phi_m(r_j) log(rho / delta) added back
// along each ray, i.e. the plain principal integral over D \ B).

#include <array>
#include <filesystem>
#include <iosfwd>

#include "nvie/grid.hpp"
#include "nvie/types.hpp"

namespace nvie {

struct WeightTable {
  ReferenceShape shape = ReferenceShape::cube;
  std::array<int, 3> grid_params{};
  double delta = 0;
  std::array<Eigen::MatrixXd, 3> scalar;                // scalar[k-1](j, m)
  std::array<std::array<Eigen::MatrixXd, 6>, 3> dyadic; // dyadic[k-1][c](j, m), c: xx xy xz yy yz zz

  int size() const { return static_cast<int>(scalar[0].rows()); }
  double omega(int k, int j, int m) const { return scalar[k - 1](j, m); }
  RealDyadic lambda(int k, int j, int m) const;
};

struct WeightTableOptions {
  /// Points per angular direction; 0 selects a default for the shape.
  int angular_points = 0;
  /// Radial points per ray; 0 selects the exact count (cube) or a default (sphere).
  int radial_points = 0;
  double tolerance = 1e-7;
  bool certify = true;
  int max_doublings = 2;
};

WeightTable compute_weight_table(const CollocationGrid& grid, double delta,
                                 const WeightTableOptions& options = {});

/// Factor s mapping the reference domain onto an element of size a:
/// a / 2 for a cube of side a, a for a sphere of radius a.
double reference_scale(ReferenceShape shape, double a);

/// Order-k entries multiplied by s^-k. Multiplying by the Jacobian s^3 gives
/// the integrals over the physical element with exclusion radius s * delta.
WeightTable rescale_weights(const WeightTable& table, double a);

/// G_j = sum_m cos|r_m - r_j| [ (w1 + w2 + w3) I - L1 - 3 L2 - 3 L3 ](j, m)
RealDyadic eval_sample_integral(const WeightTable& table, const CollocationGrid& grid, int j);

void save_table(const WeightTable& table, const std::filesystem::path& path);
WeightTable load_table(const std::filesystem::path& path);
void write_table_csv(const WeightTable& table, std::ostream& out);

/// Loads a matching table from cache_dir or computes and stores it.
WeightTable cached_weight_table(const CollocationGrid& grid, double delta,
                                const std::filesystem::path& cache_dir,
                                const WeightTableOptions& options = {});

}  // namespace nvie

#pragma once

// Nystrom discretisation of the finite-exclusion-volume VIE. The row for node
// j of element i reads
//   C c_ij - omega^2 mu sum_{n,m} A_nm c_nm - sum_m B_im c_im = E_inc(r_ij),
// with C = (1 + deps/3) I. The self blocks A_im use the interpolated weights
// (see SelfPhase for how exp(-ikR) enters), the far blocks the regular rule of
// the source element. B_im holds the three ball integrals with the kernel of
// the matching self block, so that A + B does not depend on delta.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "nvie/scene.hpp"
#include "nvie/weight_table.hpp"

namespace nvie {

/// Reference-domain ball integrals about node j (radius delta, polar
/// coordinates about the node). Same layout as WeightTable:
///   k = 1: int phi_m h / R,  k = 2: int phi_m h / R^2,
///   k = 3: int (phi_m - delta_mj) h / R^3,   h in {1, uu}.
using BallMoments = WeightTable;

BallMoments compute_ball_moments(const CollocationGrid& grid, double delta, int points = 16);

/// Shares grids, weight tables and ball moments between elements and runs.
class TableStore {
 public:
  explicit TableStore(std::filesystem::path cache_dir = {}, WeightTableOptions options = {});

  std::shared_ptr<const CollocationGrid> grid(ReferenceShape shape, const std::array<int, 3>& params);
  std::shared_ptr<const WeightTable> weights(const CollocationGrid& grid, double delta);
  std::shared_ptr<const BallMoments> ball_moments(const CollocationGrid& grid, double delta);

 private:
  using Key = std::tuple<int, std::array<int, 3>, double>;
  std::filesystem::path cache_dir_;
  WeightTableOptions options_;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const CollocationGrid>> grids_;
  std::map<Key, std::shared_ptr<const WeightTable>> tables_;
  std::map<Key, std::shared_ptr<const BallMoments>> balls_;
};

DyadicValue<double> coefficient_matrix(Complex delta_eps);

/// Treatment of exp(-ikR) in the self interaction.
enum class SelfPhase {
  /// exp(-ik R_m) at the nodes multiplies all three weight sets.
  nodal,
  /// The R^-3 and R^-1 parts of G go to the weight tables and the bounded
  /// remainder (dyadic_green_regular) to the regular rule of the element.
  expanded,
};

std::string to_string(SelfPhase phase);
/// Throws ConfigError for anything but "nodal" or "expanded".
SelfPhase parse_self_phase(const std::string& text);

/// A_im for m = 1..M: the self interaction of node j of the element.
std::vector<Dyadic> self_block(const Scatterer& element, const CollocationGrid& grid, int j,
                               const WeightTable& reference_table, const WaveParams<double>& wave,
                               SelfPhase phase = SelfPhase::expanded);

/// B_im for m = 1..M (includes the factor omega^2 mu), with the kernel of
/// the matching self_block.
std::vector<Dyadic> correction_block(const Scatterer& element, const CollocationGrid& grid, int j,
                                     const BallMoments& reference_ball,
                                     const WaveParams<double>& wave,
                                     SelfPhase phase = SelfPhase::expanded);

/// A_nm for the nodes of a source element not containing the target point.
std::vector<Dyadic> far_block(const Scatterer& source, const CollocationGrid& grid,
                              const Vec3& target, const WaveParams<double>& wave);

struct AssemblyOptions {
  bool corrections = true;
  SelfPhase phase = SelfPhase::expanded;
};

/// Unknowns of all elements; global node g = offset[i] + j.
class Discretization {
 public:
  Discretization(const Scene& scene, TableStore& store);

  const Scene& scene() const { return scene_; }
  int element_count() const { return static_cast<int>(scene_.scatterers.size()); }
  int node_count() const { return total_nodes_; }
  int offset(int i) const { return offsets_[i]; }
  const CollocationGrid& grid(int i) const { return *grids_[i]; }
  const WeightTable& table(int i) const { return *tables_[i]; }
  const BallMoments& ball(int i) const { return *balls_[i]; }
  const std::vector<Vec3>& nodes() const { return nodes_; }

 private:
  Scene scene_;
  std::vector<std::shared_ptr<const CollocationGrid>> grids_;
  std::vector<std::shared_ptr<const WeightTable>> tables_;
  std::vector<std::shared_ptr<const BallMoments>> balls_;
  std::vector<int> offsets_;
  std::vector<Vec3> nodes_;
  int total_nodes_ = 0;
};

/// V c = rhs with c = [c_x; c_y; c_z], each block of length node_count().
struct GlobalSystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};

GlobalSystem assemble(const Discretization& disc, const AssemblyOptions& options = {});

class FieldSolution {
 public:
  FieldSolution(std::shared_ptr<const Discretization> disc, Eigen::VectorXcd coefficients);

  const Discretization& discretization() const { return *disc_; }
  const Eigen::VectorXcd& coefficients() const { return c_; }
  CVec3 nodal(int g) const;
  /// Interpolated field inside a scatterer; DomainError elsewhere.
  CVec3 interior(const Vec3& x) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  Eigen::VectorXcd c_;
};

/// E_inc + omega^2 mu sum_n int deps G E over the scatterers, for points
/// outside every scatterer (DomainError otherwise).
std::vector<CVec3> scattered_field_at(const FieldSolution& solution, const std::vector<Vec3>& points);

}  // namespace nvie

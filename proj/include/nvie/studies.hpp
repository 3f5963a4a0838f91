#pragma once

// Orchestration shared by the command line tool and the acceptance run:
// table validation on the p = 3 cube, delta studies, p-convergence studies
// against the Mie series or a self reference, and CSV export.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nvie/assembly.hpp"
#include "nvie/mie.hpp"
#include "nvie/scene_config.hpp"
#include "nvie/solver.hpp"

namespace nvie {

// ---------------------------------------------------------------------------
// Benchmark scenes.

/// Cube [-pi/2, pi/2]^3, omega = mu = 1, deps = 4, incident x exp(ik(-y + z/2)).
Scene benchmark_cube_scene(int p = 3, double delta = 1e-3);
/// Sphere of radius a at the origin, omega = k, relative index m, incident x exp(ikz).
Scene mie_sphere_scene(const std::array<int, 3>& grid, double a = 0.2, double k = 1.0,
                       double m = 1.4142135623730951);
/// 3 x 3 cubes of side 0.5 in the plane z = 0, gaps 0.1, deps = 4,
/// incident z exp(ik(-2x + 2y)).
Scene cube_array_scene(int p = 3);
/// 3 x 3 spheres of radius 1 in the plane z = 0, gaps 0.1, deps = 1,
/// incident x exp(ikz).
Scene sphere_array_scene(const std::array<int, 3>& grid = {3, 3, 3});

/// log10(error) = alpha p + beta by ordinary least squares.
struct FitResult {
  double alpha = 0;
  double beta = 0;
  double residual = 0;  // root mean square of the log10 residuals
};

/// Needs at least three points with positive errors; ConfigError otherwise.
FitResult fit_log_linear(const std::vector<double>& p, const std::vector<double>& error);

/// Slope of log(y) against log(x) by least squares.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

/// Centres of the 21^3 cells of a cube element.
std::vector<Vec3> cube_sample_points(const Scatterer& element, int per_direction = 21);
/// Halton points (bases 2, 3, 5) rejected to the ball of a sphere element.
std::vector<Vec3> sphere_sample_points(const Scatterer& element, int count = 2000);
std::vector<Vec3> sample_points(const Scatterer& element);

/// sqrt(volume / n * sum |a_i - b_i|^2).
double discrete_l2(const std::vector<CVec3>& a, const std::vector<CVec3>& b, double volume);

// ---------------------------------------------------------------------------
// Weight table validation on the p = 3 cube.

enum class NodeClass { center, corner, edge, face };
const char* to_string(NodeClass c);

struct ValidationRow {
  NodeClass node_class = NodeClass::center;
  int node = 0;
  Vec3 position = Vec3::Zero();
  std::vector<RealDyadic> values;  // one per delta
  RealDyadic reference = RealDyadic::Zero();
};

struct ValidationReport {
  std::vector<double> deltas;
  double reference_delta = 1e-3;
  std::vector<ValidationRow> rows;

  const ValidationRow& row(NodeClass c) const;
  /// |value - reference| of component (a, b) per delta.
  std::vector<double> errors(NodeClass c, int a, int b) const;
  /// Orders between successive deltas; entry 0 is NaN.
  std::vector<double> orders(NodeClass c, int a, int b) const;
};

/// The reference is the direct polar integral of the interpolated sample
/// integrand at reference_delta.
ValidationReport validate_tables(const std::vector<double>& deltas, double reference_delta,
                                 TableStore& store);
void write_validation_report(const ValidationReport& report, std::ostream& out);

// ---------------------------------------------------------------------------
// Solving a scene.

struct SolveOutput {
  std::shared_ptr<const Discretization> discretization;
  GlobalSystem system;
  SolveResult result;
  FieldSolution solution() const { return FieldSolution(discretization, result.x); }
};

SolveOutput solve_scene(const Scene& scene, TableStore& store, const SolveConfig& solver,
                        const AssemblyOptions& options = {});

void write_nodal_csv(const FieldSolution& solution, std::ostream& out);
void write_field_csv(const std::vector<Vec3>& points, const std::vector<CVec3>& field,
                     std::ostream& out);

/// Total field on a slice of the scene's bounding box: interpolated inside the
/// scatterers, incident plus scattered outside.
struct FieldSlice {
  std::vector<Vec3> points;
  std::vector<CVec3> field;
};
FieldSlice sample_slice(const FieldSolution& solution, const OutputConfig& output);

// ---------------------------------------------------------------------------
// Delta independence.

struct DeltaStudyReport {
  std::vector<double> deltas;
  double reference_delta = 1e-3;
  AssemblyOptions options;
  std::vector<double> max_entry_difference;  // over the whole matrix, per delta
  /// Per delta: |V_row - V_row_ref| along one row of the xx and xy blocks.
  std::vector<std::vector<Complex>> row_xx_difference;
  std::vector<std::vector<Complex>> row_xy_difference;
  int row = 0;
  /// Per delta: L-infinity nodal difference of Ex, Ey, Ez.
  std::vector<std::array<double, 3>> solution_difference;
  double entry_order = 0;
  std::array<double, 3> solution_order{};
};

DeltaStudyReport delta_study(const Scene& scene, const std::vector<double>& deltas,
                             double reference_delta, const AssemblyOptions& options,
                             TableStore& store, const SolveConfig& solver);
void write_delta_report(const DeltaStudyReport& report, std::ostream& out);
void write_delta_profile(const DeltaStudyReport& report, std::ostream& out);

// ---------------------------------------------------------------------------
// Convergence in the interpolation order.

enum class StudyKind { sphere, cube };

struct ConvergencePoint {
  std::array<int, 3> grid{};
  double p = 0;  // equivalent points per direction
  int nodes = 0;
  double error = 0;
  int iterations = 0;
  double seconds = 0;
};

struct ConvergenceReport {
  StudyKind kind = StudyKind::sphere;
  std::vector<ConvergencePoint> points;
  std::array<int, 3> reference_grid{};  // cube self reference
  FitResult fit;
  bool monotone = false;
};

/// Mie parameters of a single-sphere scene; ConfigError unless the incident
/// wave is x-polarised and travels along +z.
MieConfig mie_config_for(const Scene& scene);

/// Sphere: every grid of `resolutions` against the Mie series. Cube: every
/// grid against `reference` (p = 7 by default). The scene must hold a single
/// scatterer of the study's shape; its grid is replaced.
ConvergenceReport convergence_study(StudyKind kind, const Scene& scene,
                                    const std::vector<std::array<int, 3>>& resolutions,
                                    const std::array<int, 3>& reference, TableStore& store,
                                    const SolveConfig& solver,
                                    const AssemblyOptions& options = {});
void write_convergence_report(const ConvergenceReport& report, std::ostream& out);

// ---------------------------------------------------------------------------
// Comparison against the Mie series for a single sphere.

struct MieComparison {
  double nodal_max = 0;          // max |E - E_mie| over the nodes
  double nodal_relative = 0;     // the same over max |E_mie|
  double sample_l2 = 0;          // discrete L2 over the sample points
  std::vector<Vec3> points;      // sample points
  std::vector<CVec3> vie;
  std::vector<CVec3> mie;
};

MieComparison mie_compare(const FieldSolution& solution, const MieConfig& config);

}  // namespace nvie

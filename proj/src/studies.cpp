#include "nvie/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "nvie/brute_force.hpp"
#include "nvie/errors.hpp"

namespace nvie {

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept,
                 double* rms) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw ConfigError("fit: abscissae must not all coincide");
  const double slope = (n * sxy - sx * sy) / den;
  const double b = (sy - slope * sx) / n;
  if (intercept) *intercept = b;
  if (rms) {
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - slope * x[i] - b, 2);
    *rms = std::sqrt(ss / n);
  }
  return slope;
}

double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

std::vector<CVec3> interior_values(const FieldSolution& solution, const std::vector<Vec3>& points) {
  std::vector<CVec3> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = solution.interior(points[i]);
  return out;
}

void write_complex_vector(const CVec3& e, std::ostream& out) {
  for (int c = 0; c < 3; ++c) out << ',' << e[c].real() << ',' << e[c].imag();
}

}  // namespace

Scene benchmark_cube_scene(int p, double delta) {
  Scene s;
  s.wave = WaveParams<double>::make(1.0, 1.0, 1.0);
  s.delta = delta;
  s.incident.polarization = CVec3(1, 0, 0);
  s.incident.wave_vector = s.wave.k * Vec3(0, -1, 0.5);
  Scatterer c;
  c.shape = ReferenceShape::cube;
  c.size = kPi;
  c.delta_eps = 4.0;
  c.grid_params = {p, p, p};
  s.scatterers = {c};
  return s;
}

Scene mie_sphere_scene(const std::array<int, 3>& grid, double a, double k, double m) {
  Scene s;
  s.wave = WaveParams<double>::make(k, 1.0, 1.0);
  s.incident.polarization = CVec3(1, 0, 0);
  s.incident.wave_vector = Vec3(0, 0, s.wave.k);
  Scatterer b;
  b.shape = ReferenceShape::sphere;
  b.size = a;
  b.delta_eps = m * m - 1.0;
  b.grid_params = grid;
  s.scatterers = {b};
  return s;
}

namespace {

Scene planar_array(const Scatterer& proto, double pitch) {
  Scene s;
  for (int j = -1; j <= 1; ++j)
    for (int i = -1; i <= 1; ++i) {
      Scatterer e = proto;
      e.center = Vec3(i * pitch, j * pitch, 0);
      s.scatterers.push_back(e);
    }
  return s;
}

}  // namespace

Scene cube_array_scene(int p) {
  Scatterer c;
  c.shape = ReferenceShape::cube;
  c.size = 0.5;
  c.delta_eps = 4.0;
  c.grid_params = {p, p, p};
  Scene s = planar_array(c, 0.6);
  s.incident.polarization = CVec3(0, 0, 1);
  s.incident.wave_vector = s.wave.k * Vec3(-2, 2, 0);
  return s;
}

Scene sphere_array_scene(const std::array<int, 3>& grid) {
  Scatterer b;
  b.shape = ReferenceShape::sphere;
  b.size = 1.0;
  b.delta_eps = 1.0;
  b.grid_params = grid;
  Scene s = planar_array(b, 2.1);
  s.incident.polarization = CVec3(1, 0, 0);
  s.incident.wave_vector = Vec3(0, 0, s.wave.k);
  return s;
}

FitResult fit_log_linear(const std::vector<double>& p, const std::vector<double>& error) {
  if (p.size() != error.size()) throw ConfigError("fit: size mismatch");
  if (p.size() < 3) throw ConfigError("fit: at least three resolutions are needed");
  std::vector<double> y(error.size());
  for (std::size_t i = 0; i < error.size(); ++i) {
    if (!(error[i] > 0)) throw ConfigError("fit: errors must be positive");
    y[i] = std::log10(error[i]);
  }
  FitResult f;
  f.alpha = ols_slope(p, y, &f.beta, &f.residual);
  return f;
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return ols_slope(lx, ly, nullptr, nullptr);
}

std::vector<Vec3> cube_sample_points(const Scatterer& element, int per_direction) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(per_direction) * per_direction * per_direction);
  const double h = 2.0 / per_direction;
  for (int k = 0; k < per_direction; ++k)
    for (int j = 0; j < per_direction; ++j)
      for (int i = 0; i < per_direction; ++i)
        pts.push_back(element.to_physical(
            Vec3(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h)));
  return pts;
}

std::vector<Vec3> sphere_sample_points(const Scatterer& element, int count) {
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (int i = 1; static_cast<int>(pts.size()) < count; ++i) {
    const Vec3 x(2.0 * radical_inverse(i, 2) - 1.0, 2.0 * radical_inverse(i, 3) - 1.0,
                 2.0 * radical_inverse(i, 5) - 1.0);
    if (x.squaredNorm() < 1.0) pts.push_back(element.to_physical(x));
  }
  return pts;
}

std::vector<Vec3> sample_points(const Scatterer& element) {
  return element.shape == ReferenceShape::cube ? cube_sample_points(element)
                                               : sphere_sample_points(element);
}

double discrete_l2(const std::vector<CVec3>& a, const std::vector<CVec3>& b, double volume) {
  if (a.size() != b.size() || a.empty()) throw DomainError("discrete_l2: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(volume / static_cast<double>(a.size()) * s);
}

// ---------------------------------------------------------------------------

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::center: return "center";
    case NodeClass::corner: return "corner";
    case NodeClass::edge: return "edge";
    case NodeClass::face: return "face";
  }
  return "?";
}

const ValidationRow& ValidationReport::row(NodeClass c) const {
  for (const auto& r : rows)
    if (r.node_class == c) return r;
  throw DomainError("validation report: missing node class");
}

std::vector<double> ValidationReport::errors(NodeClass c, int a, int b) const {
  const auto& r = row(c);
  std::vector<double> e;
  for (const auto& v : r.values) e.push_back(std::abs(v(a, b) - r.reference(a, b)));
  return e;
}

std::vector<double> ValidationReport::orders(NodeClass c, int a, int b) const {
  const auto e = errors(c, a, b);
  std::vector<double> o(e.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < e.size(); ++i)
    o[i] = std::log(e[i - 1] / e[i]) / std::log(deltas[i - 1] / deltas[i]);
  return o;
}

ValidationReport validate_tables(const std::vector<double>& deltas, double reference_delta,
                                 TableStore& store) {
  const auto grid = store.grid(ReferenceShape::cube, {3, 3, 3});
  const double s = grid->radial_or_axis_nodes().back();
  const std::array<std::pair<NodeClass, Vec3>, 4> classes{{{NodeClass::center, Vec3(0, 0, 0)},
                                                           {NodeClass::corner, Vec3(s, s, s)},
                                                           {NodeClass::edge, Vec3(0, s, s)},
                                                           {NodeClass::face, Vec3(0, 0, s)}}};
  ValidationReport report;
  report.deltas = deltas;
  report.reference_delta = reference_delta;
  std::vector<std::shared_ptr<const WeightTable>> tables;
  for (double d : deltas) tables.push_back(store.weights(*grid, d));
  for (const auto& [cls, x] : classes) {
    ValidationRow row;
    row.node_class = cls;
    row.position = x;
    row.node = -1;
    for (int j = 0; j < grid->size(); ++j)
      if ((grid->node(j) - x).norm() < 1e-12) row.node = j;
    for (const auto& t : tables) row.values.push_back(eval_sample_integral(*t, *grid, row.node));

    Eigen::VectorXd fm(grid->size());
    for (int m = 0; m < grid->size(); ++m) fm[m] = std::cos((grid->node(m) - x).norm());
    const auto f = [&](const Vec3& y) { return grid->basis(y).dot(fm); };
    const auto mo = brute_force_moments(Domain::reference(ReferenceShape::cube), x,
                                        reference_delta, f, BruteForceOptions{32, 1e-9, 3});
    row.reference = (mo.scalar[0] + mo.scalar[1] + mo.scalar[2]) * RealDyadic::Identity() -
                    mo.dyadic[0] - 3.0 * mo.dyadic[1] - 3.0 * mo.dyadic[2];
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_validation_report(const ValidationReport& report, std::ostream& out) {
  const auto old = out.precision(9);
  out << "class,component,delta,value,reference,error,order\n";
  static const std::array<std::pair<int, int>, 6> comps{
      {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
  for (const auto& row : report.rows) {
    for (const auto& [a, b] : comps) {
      const auto e = report.errors(row.node_class, a, b);
      const auto o = report.orders(row.node_class, a, b);
      for (std::size_t i = 0; i < report.deltas.size(); ++i) {
        out << to_string(row.node_class) << ",g" << a + 1 << b + 1 << ',' << report.deltas[i]
            << ',' << row.values[i](a, b) << ',' << row.reference(a, b) << ',' << e[i] << ',';
        if (i > 0) out << o[i];
        out << '\n';
      }
    }
  }
  out.precision(old);
}

// ---------------------------------------------------------------------------

SolveOutput solve_scene(const Scene& scene, TableStore& store, const SolveConfig& solver,
                        const AssemblyOptions& options) {
  SolveOutput out;
  out.discretization = std::make_shared<const Discretization>(scene, store);
  out.system = assemble(*out.discretization, options);
  out.result = krylov_solve(out.system.matrix, out.system.rhs, solver);
  return out;
}

void write_nodal_csv(const FieldSolution& solution, std::ostream& out) {
  const auto& disc = solution.discretization();
  const auto old = out.precision(17);
  out << "node,element,x,y,z,Re(Ex),Im(Ex),Re(Ey),Im(Ey),Re(Ez),Im(Ez)\n";
  for (int i = 0; i < disc.element_count(); ++i) {
    for (int j = 0; j < disc.grid(i).size(); ++j) {
      const int g = disc.offset(i) + j;
      const Vec3& x = disc.nodes()[g];
      out << g << ',' << i << ',' << x[0] << ',' << x[1] << ',' << x[2];
      write_complex_vector(solution.nodal(g), out);
      out << '\n';
    }
  }
  out.precision(old);
}

void write_field_csv(const std::vector<Vec3>& points, const std::vector<CVec3>& field,
                     std::ostream& out) {
  const auto old = out.precision(17);
  out << "x,y,z,Re(Ex),Im(Ex),Re(Ey),Im(Ey),Re(Ez),Im(Ez)\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << points[i][0] << ',' << points[i][1] << ',' << points[i][2];
    write_complex_vector(field[i], out);
    out << '\n';
  }
  out.precision(old);
}

FieldSlice sample_slice(const FieldSolution& solution, const OutputConfig& output) {
  const Scene& scene = solution.discretization().scene();
  const int axis = output.slice_axis - 'x';
  if (axis < 0 || axis > 2) throw ConfigError("output: slice_axis must be x, y or z");
  if (output.resolution < 2) throw ConfigError("output: resolution must be at least 2");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& s : scene.scatterers) {
    const Vec3 r = Vec3::Constant(s.scale());
    lo = lo.cwiseMin(s.center - r);
    hi = hi.cwiseMax(s.center + r);
  }
  const Vec3 pad = output.margin * (hi - lo);
  lo -= pad;
  hi += pad;
  const int a = (axis + 1) % 3, b = (axis + 2) % 3;
  const int n = output.resolution;
  FieldSlice slice;
  std::vector<Vec3> outside;
  std::vector<std::size_t> outside_index;
  for (int jb = 0; jb < n; ++jb) {
    for (int ja = 0; ja < n; ++ja) {
      Vec3 x;
      x[axis] = output.slice_value;
      x[a] = lo[a] + (hi[a] - lo[a]) * ja / (n - 1);
      x[b] = lo[b] + (hi[b] - lo[b]) * jb / (n - 1);
      slice.points.push_back(x);
      if (scene.element_containing(x) >= 0) {
        slice.field.push_back(solution.interior(x));
      } else {
        slice.field.emplace_back(CVec3::Zero());
        outside.push_back(x);
        outside_index.push_back(slice.points.size() - 1);
      }
    }
  }
  const auto ext = scattered_field_at(solution, outside);
  for (std::size_t i = 0; i < ext.size(); ++i) slice.field[outside_index[i]] = ext[i];
  return slice;
}

// ---------------------------------------------------------------------------

DeltaStudyReport delta_study(const Scene& scene, const std::vector<double>& deltas,
                             double reference_delta, const AssemblyOptions& options,
                             TableStore& store,
                             const SolveConfig& solver) {
  DeltaStudyReport report;
  report.deltas = deltas;
  report.reference_delta = reference_delta;
  report.options = options;

  Scene ref_scene = scene;
  ref_scene.delta = reference_delta;
  const SolveOutput ref = solve_scene(ref_scene, store, solver, options);
  const int n = ref.discretization->node_count();
  const Eigen::MatrixXcd& V0 = ref.system.matrix;

  std::vector<double> diff_x, diff_y, diff_z;
  for (double d : deltas) {
    Scene s = scene;
    s.delta = d;
    const SolveOutput cur = solve_scene(s, store, solver, options);
    const Eigen::MatrixXcd D = cur.system.matrix - V0;
    report.max_entry_difference.push_back(D.cwiseAbs().maxCoeff());
    std::vector<Complex> xx(n), xy(n);
    for (int m = 0; m < n; ++m) {
      xx[m] = D(report.row, m);
      xy[m] = D(report.row, n + m);
    }
    report.row_xx_difference.push_back(std::move(xx));
    report.row_xy_difference.push_back(std::move(xy));
    std::array<double, 3> sd{};
    for (int c = 0; c < 3; ++c)
      sd[c] = (cur.result.x.segment(c * n, n) - ref.result.x.segment(c * n, n)).cwiseAbs().maxCoeff();
    report.solution_difference.push_back(sd);
    diff_x.push_back(sd[0]);
    diff_y.push_back(sd[1]);
    diff_z.push_back(sd[2]);
  }
  report.entry_order = fitted_order(deltas, report.max_entry_difference);
  report.solution_order = {fitted_order(deltas, diff_x), fitted_order(deltas, diff_y),
                           fitted_order(deltas, diff_z)};
  return report;
}

void write_delta_report(const DeltaStudyReport& report, std::ostream& out) {
  const auto old = out.precision(6);
  out << "# corrections " << (report.options.corrections ? "on" : "off") << ", phase "
      << to_string(report.options.phase) << ", reference delta "
      << report.reference_delta << '\n';
  out << "delta,max_entry_difference,Ex_linf,Ey_linf,Ez_linf\n";
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    out << report.deltas[i] << ',' << report.max_entry_difference[i];
    for (double v : report.solution_difference[i]) out << ',' << v;
    out << '\n';
  }
  out << "# fitted order: entries " << report.entry_order << ", Ex " << report.solution_order[0]
      << ", Ey " << report.solution_order[1] << ", Ez " << report.solution_order[2] << '\n';
  out.precision(old);
}

void write_delta_profile(const DeltaStudyReport& report, std::ostream& out) {
  const auto old = out.precision(9);
  out << "delta,column,Re(dVxx),Im(dVxx),Re(dVxy),Im(dVxy)\n";
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    const auto& xx = report.row_xx_difference[i];
    const auto& xy = report.row_xy_difference[i];
    for (std::size_t m = 0; m < xx.size(); ++m)
      out << report.deltas[i] << ',' << m << ',' << xx[m].real() << ',' << xx[m].imag() << ','
          << xy[m].real() << ',' << xy[m].imag() << '\n';
  }
  out.precision(old);
}

// ---------------------------------------------------------------------------

MieConfig mie_config_for(const Scene& scene) {
  if (scene.scatterers.size() != 1 || scene.scatterers[0].shape != ReferenceShape::sphere)
    throw ConfigError("Mie comparison needs a scene with a single sphere");
  const double k = scene.wave.k;
  const auto& inc = scene.incident;
  if ((inc.polarization - CVec3(1, 0, 0)).norm() > 1e-12 ||
      (inc.wave_vector - Vec3(0, 0, k)).norm() > 1e-12 * k)
    throw ConfigError("Mie comparison needs the incident wave (1, 0, 0) exp(ikz)");
  const Scatterer& s = scene.scatterers[0];
  MieConfig cfg;
  cfg.a = s.size;
  cfg.k = k;
  cfg.m = std::sqrt(1.0 + s.delta_eps / scene.wave.eps_background);
  return cfg;
}

namespace {

// Mie field of a sphere centred at c: the incident phase at c times the
// series about c.
std::vector<CVec3> mie_values(const MieConfig& cfg, const Vec3& c, double k,
                              const std::vector<Vec3>& points) {
  const auto co = mie_coefficients(cfg);
  const Complex phase = std::exp(Complex(0, k * c[2]));
  std::vector<CVec3> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec3 x = points[i] - c;
    if (x.norm() > cfg.a) x *= cfg.a / x.norm();
    out[i] = phase * mie_interior_field(cfg, co, x);
  }
  return out;
}

}  // namespace

MieComparison mie_compare(const FieldSolution& solution, const MieConfig& config) {
  const auto& disc = solution.discretization();
  const Scatterer& s = disc.scene().scatterers.at(0);
  MieComparison cmp;
  const auto mie_nodes = mie_values(config, s.center, config.k, disc.nodes());
  double peak = 0;
  for (int g = 0; g < disc.node_count(); ++g) {
    cmp.nodal_max = std::max(cmp.nodal_max, (solution.nodal(g) - mie_nodes[g]).norm());
    peak = std::max(peak, mie_nodes[g].norm());
  }
  cmp.nodal_relative = cmp.nodal_max / peak;
  cmp.points = sphere_sample_points(s);
  cmp.vie = interior_values(solution, cmp.points);
  cmp.mie = mie_values(config, s.center, config.k, cmp.points);
  cmp.sample_l2 = discrete_l2(cmp.vie, cmp.mie, s.volume());
  return cmp;
}

ConvergenceReport convergence_study(StudyKind kind, const Scene& scene,
                                    const std::vector<std::array<int, 3>>& resolutions,
                                    const std::array<int, 3>& reference, TableStore& store,
                                    const SolveConfig& solver, const AssemblyOptions& options) {
  const ReferenceShape shape = kind == StudyKind::sphere ? ReferenceShape::sphere
                                                         : ReferenceShape::cube;
  if (scene.scatterers.size() != 1 || scene.scatterers[0].shape != shape)
    throw ConfigError("convergence study: the scene must hold a single scatterer of the study's shape");
  if (resolutions.size() < 3) throw ConfigError("convergence study: at least three resolutions are needed");

  ConvergenceReport report;
  report.kind = kind;
  const Scatterer& base = scene.scatterers[0];
  const std::vector<Vec3> pts = sample_points(base);

  std::vector<CVec3> ref_values;
  if (kind == StudyKind::sphere) {
    const MieConfig cfg = mie_config_for(scene);
    ref_values = mie_values(cfg, base.center, cfg.k, pts);
  } else {
    report.reference_grid = reference;
    Scene s = scene;
    s.scatterers[0].grid_params = reference;
    const SolveOutput out = solve_scene(s, store, solver, options);
    ref_values = interior_values(out.solution(), pts);
  }

  for (const auto& res : resolutions) {
    const auto t0 = std::chrono::steady_clock::now();
    Scene s = scene;
    s.scatterers[0].grid_params = res;
    const SolveOutput out = solve_scene(s, store, solver, options);
    ConvergencePoint cp;
    cp.grid = res;
    cp.nodes = out.discretization->node_count();
    cp.p = out.discretization->grid(0).effective_order();
    cp.error = discrete_l2(interior_values(out.solution(), pts), ref_values, base.volume());
    cp.iterations = out.result.iterations;
    cp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.points.push_back(cp);
  }
  std::sort(report.points.begin(), report.points.end(),
            [](const ConvergencePoint& a, const ConvergencePoint& b) { return a.p < b.p; });
  std::vector<double> p, e;
  report.monotone = true;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    p.push_back(report.points[i].p);
    e.push_back(report.points[i].error);
    if (i > 0 && !(e[i] < e[i - 1])) report.monotone = false;
  }
  report.fit = fit_log_linear(p, e);
  return report;
}

void write_convergence_report(const ConvergenceReport& report, std::ostream& out) {
  const auto old = out.precision(6);
  out << "# " << (report.kind == StudyKind::sphere ? "sphere vs Mie" : "cube vs self reference");
  if (report.kind == StudyKind::cube)
    out << " p=" << report.reference_grid[0];
  out << '\n';
  out << "grid,nodes,p,error,log10_error,iterations,seconds\n";
  for (const auto& cp : report.points) {
    out << cp.grid[0] << ' ' << cp.grid[1] << ' ' << cp.grid[2] << ',' << cp.nodes << ',' << cp.p
        << ',' << cp.error << ',' << std::log10(cp.error) << ',' << cp.iterations << ','
        << cp.seconds << '\n';
  }
  out << "# alpha " << report.fit.alpha << " beta " << report.fit.beta << " residual "
      << report.fit.residual << " monotone " << (report.monotone ? "yes" : "no") << '\n';
  out.precision(old);
}

}  // namespace nvie

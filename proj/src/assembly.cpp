#include "nvie/assembly.hpp"

#include <cmath>
#include <string>

#include "nvie/errors.hpp"
#include "nvie/quadrature.hpp"

namespace nvie {

BallMoments compute_ball_moments(const CollocationGrid& grid, double delta, int points) {
  if (!(delta > 0)) throw DomainError("compute_ball_moments: delta must be positive");
  if (delta >= grid.min_boundary_distance()) {
    throw GeometryError("compute_ball_moments: exclusion ball of radius " + std::to_string(delta) +
                        " leaves the reference domain");
  }
  const int M = grid.size();
  const auto gr = gauss_legendre(points, 0.0, delta);
  const auto& gc = gauss_legendre(points);
  const int n_psi = 2 * points;
  const int n_pts = points * points * n_psi;

  // Directions, radii and weights are shared by all nodes.
  std::vector<Vec3> dirs;
  std::vector<double> dir_w;
  dirs.reserve(points * n_psi);
  for (int it = 0; it < points; ++it) {
    const double ct = gc.nodes[it], st = std::sqrt(1.0 - ct * ct);
    for (int ip = 0; ip < n_psi; ++ip) {
      const double ps = 2.0 * kPi * ip / n_psi;
      dirs.emplace_back(st * std::cos(ps), st * std::sin(ps), ct);
      dir_w.push_back(gc.weights[it] * 2.0 * kPi / n_psi);
    }
  }
  Eigen::MatrixXd W(n_pts, 21);
  int row = 0;
  for (int ir = 0; ir < points; ++ir) {
    const double R = gr.nodes[ir];
    for (std::size_t d = 0; d < dirs.size(); ++d, ++row) {
      const Vec3& u = dirs[d];
      const double uu[6] = {u[0] * u[0], u[0] * u[1], u[0] * u[2], u[1] * u[1], u[1] * u[2], u[2] * u[2]};
      const double w = gr.weights[ir] * dir_w[d] * R * R;
      const double wk[3] = {w / R, w / (R * R), w / (R * R * R)};
      for (int k = 0; k < 3; ++k) {
        W(row, 7 * k) = wk[k];
        for (int c = 0; c < 6; ++c) W(row, 7 * k + 1 + c) = wk[k] * uu[c];
      }
    }
  }
  const Eigen::VectorXd w3_sum = W.middleCols(14, 7).colwise().sum().transpose();

  BallMoments t;
  t.shape = grid.shape();
  t.grid_params = grid.params();
  t.delta = delta;
  for (int k = 0; k < 3; ++k) {
    t.scalar[k].resize(M, M);
    for (auto& d : t.dyadic[k]) d.resize(M, M);
  }
#pragma omp parallel
  {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Phi(n_pts, M);
#pragma omp for schedule(dynamic)
    for (int j = 0; j < M; ++j) {
      const Vec3& xi = grid.node(j);
      int r = 0;
      for (int ir = 0; ir < points; ++ir)
        for (std::size_t d = 0; d < dirs.size(); ++d, ++r)
          grid.basis(xi + gr.nodes[ir] * dirs[d], Phi.row(r).data());
      Eigen::MatrixXd res = W.transpose() * Phi;
      res.col(j).segment(14, 7) -= w3_sum;
      for (int k = 0; k < 3; ++k) {
        t.scalar[k].row(j) = res.row(7 * k);
        for (int c = 0; c < 6; ++c) t.dyadic[k][c].row(j) = res.row(7 * k + 1 + c);
      }
    }
  }
  return t;
}

TableStore::TableStore(std::filesystem::path cache_dir, WeightTableOptions options)
    : cache_dir_(std::move(cache_dir)), options_(options) {}

std::shared_ptr<const CollocationGrid> TableStore::grid(ReferenceShape shape,
                                                        const std::array<int, 3>& params) {
  std::lock_guard lock(mutex_);
  const Key key{static_cast<int>(shape), params, 0.0};
  auto& slot = grids_[key];
  if (!slot) slot = std::make_shared<const CollocationGrid>(CollocationGrid::make(shape, params));
  return slot;
}

std::shared_ptr<const WeightTable> TableStore::weights(const CollocationGrid& grid, double delta) {
  std::lock_guard lock(mutex_);
  const Key key{static_cast<int>(grid.shape()), grid.params(), delta};
  auto& slot = tables_[key];
  if (!slot) {
    slot = std::make_shared<const WeightTable>(
        cache_dir_.empty() ? compute_weight_table(grid, delta, options_)
                           : cached_weight_table(grid, delta, cache_dir_, options_));
  }
  return slot;
}

std::shared_ptr<const BallMoments> TableStore::ball_moments(const CollocationGrid& grid,
                                                            double delta) {
  std::lock_guard lock(mutex_);
  const Key key{static_cast<int>(grid.shape()), grid.params(), delta};
  auto& slot = balls_[key];
  if (!slot) slot = std::make_shared<const BallMoments>(compute_ball_moments(grid, delta));
  return slot;
}

std::string to_string(SelfPhase phase) {
  return phase == SelfPhase::nodal ? "nodal" : "expanded";
}

SelfPhase parse_self_phase(const std::string& text) {
  if (text == "nodal") return SelfPhase::nodal;
  if (text == "expanded") return SelfPhase::expanded;
  throw ConfigError("self phase must be nodal or expanded, got '" + text + "'");
}

DyadicValue<double> coefficient_matrix(Complex delta_eps) {
  return (1.0 + delta_eps / 3.0) * Dyadic::Identity();
}

namespace {

// sum_k f_k (omega_k I - c_k Lambda_k).
Dyadic combine(const WeightTable& t, int j, int m, const std::array<Complex, 3>& f,
               const std::array<double, 3>& c = {1.0, 3.0, 3.0}) {
  Dyadic out = Dyadic::Zero();
  for (int k = 1; k <= 3; ++k) {
    if (f[k - 1] == 0.0) continue;
    const RealDyadic part = t.omega(k, j, m) * RealDyadic::Identity() - c[k - 1] * t.lambda(k, j, m);
    out += f[k - 1] * part.cast<Complex>();
  }
  return out;
}

void check_grid(const Scatterer& e, const CollocationGrid& g, const WeightTable& t) {
  if (e.shape != g.shape() || e.grid_params != g.params() || t.shape != g.shape() ||
      t.grid_params != g.params()) {
    throw ConfigError("element, grid and table do not match");
  }
}

// Tables of the R^-3 and R^-1 parts of G: -(I - 3uu) / (4 pi k^2 R^3) and
// (I + uu) / (8 pi R), in units of s^3 / (4 pi).
const std::array<double, 3> kExpandedH{-1.0, 0.0, 3.0};

std::array<Complex, 3> expanded_factors(double s, double k) {
  return {0.5 / s, 0.0, -1.0 / (k * k * s * s * s)};
}

}  // namespace

std::vector<Dyadic> self_block(const Scatterer& element, const CollocationGrid& grid, int j,
                               const WeightTable& table, const WaveParams<double>& wave,
                               SelfPhase phase) {
  check_grid(element, grid, table);
  const double s = element.scale(), k = wave.k;
  const Complex pre = s * s * s / (4.0 * kPi) * element.delta_eps;
  std::vector<Dyadic> out(grid.size());
  if (phase == SelfPhase::expanded) {
    const auto f = expanded_factors(s, k);
    const auto& w = grid.regular_weights();
    const Vec3 x = s * grid.node(j);
    for (int m = 0; m < grid.size(); ++m) {
      out[m] = pre * combine(table, j, m, f, kExpandedH) +
               (s * s * s * w[m] * element.delta_eps) *
                   dyadic_green_regular<double>(x, s * grid.node(m), k);
    }
    return out;
  }
  const std::array<Complex, 3> f{1.0 / s, Complex(0, -1) / (k * s * s), -1.0 / (k * k * s * s * s)};
  for (int m = 0; m < grid.size(); ++m) {
    const double R = s * (grid.node(m) - grid.node(j)).norm();
    out[m] = pre * std::exp(Complex(0, -k * R)) * combine(table, j, m, f);
  }
  return out;
}

std::vector<Dyadic> correction_block(const Scatterer& element, const CollocationGrid& grid, int j,
                                     const BallMoments& ball, const WaveParams<double>& wave,
                                     SelfPhase phase) {
  check_grid(element, grid, ball);
  const double s = element.scale(), k = wave.k;
  const Complex pre = wave.omega * wave.omega * wave.mu * element.delta_eps / (4.0 * kPi);
  std::vector<Dyadic> out(grid.size());
  if (phase == SelfPhase::expanded) {
    const double s3 = s * s * s;
    auto f = expanded_factors(s, k);
    for (auto& v : f) v *= s3;
    for (int m = 0; m < grid.size(); ++m) out[m] = pre * combine(ball, j, m, f, kExpandedH);
    return out;
  }
  const std::array<Complex, 3> f{s * s, Complex(0, -s / k), -1.0 / (k * k)};
  for (int m = 0; m < grid.size(); ++m) {
    const double R = s * (grid.node(m) - grid.node(j)).norm();
    out[m] = pre * std::exp(Complex(0, -k * R)) * combine(ball, j, m, f);
  }
  return out;
}

std::vector<Dyadic> far_block(const Scatterer& source, const CollocationGrid& grid,
                              const Vec3& target, const WaveParams<double>& wave) {
  if (source.contains(target)) throw DomainError("far_block: target lies inside the source element");
  const double s = source.scale();
  const Complex pre = s * s * s * source.delta_eps;
  const auto& w = grid.regular_weights();
  std::vector<Dyadic> out(grid.size());
  for (int m = 0; m < grid.size(); ++m) {
    out[m] = (pre * w[m]) * dyadic_green(target, source.to_physical(grid.node(m)), wave);
  }
  return out;
}

Discretization::Discretization(const Scene& scene, TableStore& store) : scene_(scene) {
  scene_.validate();
  for (const auto& s : scene_.scatterers) {
    auto g = store.grid(s.shape, s.grid_params);
    if (scene_.delta >= g->min_boundary_distance()) {
      throw ConfigError("delta = " + std::to_string(scene_.delta) +
                        " reaches the element boundary from the outermost nodes");
    }
    grids_.push_back(g);
    tables_.push_back(store.weights(*g, scene_.delta));
    balls_.push_back(store.ball_moments(*g, scene_.delta));
    offsets_.push_back(total_nodes_);
    for (const auto& xi : g->nodes()) nodes_.push_back(s.to_physical(xi));
    total_nodes_ += g->size();
  }
}

GlobalSystem assemble(const Discretization& disc, const AssemblyOptions& options) {
  const Scene& scene = disc.scene();
  const auto& wave = scene.wave;
  const int N = disc.node_count();
  const double w2mu = wave.omega * wave.omega * wave.mu;
  GlobalSystem sys;
  sys.matrix = Eigen::MatrixXcd::Zero(3 * N, 3 * N);
  sys.rhs.resize(3 * N);
  const int n_elem = disc.element_count();

  std::vector<std::pair<int, int>> rows;
  for (int i = 0; i < n_elem; ++i)
    for (int j = 0; j < disc.grid(i).size(); ++j) rows.emplace_back(i, j);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    const auto [i, j] = rows[r];
    const int g = disc.offset(i) + j;
    const Scatterer& elem = scene.scatterers[i];
    const Vec3& x = disc.nodes()[g];
    auto put = [&](int col, const Dyadic& D) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) sys.matrix(a * N + g, b * N + col) += D(a, b);
    };
    for (int n = 0; n < n_elem; ++n) {
      const int off = disc.offset(n);
      if (n == i) {
        const auto A = self_block(elem, disc.grid(i), j, disc.table(i), wave, options.phase);
        for (int m = 0; m < static_cast<int>(A.size()); ++m) put(off + m, -w2mu * A[m]);
        if (options.corrections) {
          const auto B = correction_block(elem, disc.grid(i), j, disc.ball(i), wave, options.phase);
          for (int m = 0; m < static_cast<int>(B.size()); ++m) put(off + m, -B[m]);
        }
      } else {
        const auto A = far_block(scene.scatterers[n], disc.grid(n), x, wave);
        for (int m = 0; m < static_cast<int>(A.size()); ++m) put(off + m, -w2mu * A[m]);
      }
    }
    put(g, coefficient_matrix(elem.delta_eps));
    const CVec3 e = scene.incident(x);
    for (int a = 0; a < 3; ++a) sys.rhs[a * N + g] = e[a];
  }
  return sys;
}

FieldSolution::FieldSolution(std::shared_ptr<const Discretization> disc, Eigen::VectorXcd c)
    : disc_(std::move(disc)), c_(std::move(c)) {
  if (c_.size() != 3 * disc_->node_count()) {
    throw DomainError("FieldSolution: coefficient vector does not match the discretization");
  }
}

CVec3 FieldSolution::nodal(int g) const {
  const int N = disc_->node_count();
  return CVec3(c_[g], c_[N + g], c_[2 * N + g]);
}

CVec3 FieldSolution::interior(const Vec3& x) const {
  const int i = disc_->scene().element_containing(x);
  if (i < 0) throw DomainError("FieldSolution::interior: point is not inside a scatterer");
  const auto& grid = disc_->grid(i);
  const Eigen::VectorXd phi = grid.basis(disc_->scene().scatterers[i].to_reference(x));
  const int N = disc_->node_count(), off = disc_->offset(i);
  CVec3 e = CVec3::Zero();
  for (int a = 0; a < 3; ++a) e[a] = phi.cast<Complex>().dot(c_.segment(a * N + off, grid.size()));
  return e;
}

std::vector<CVec3> scattered_field_at(const FieldSolution& solution,
                                      const std::vector<Vec3>& points) {
  const auto& disc = solution.discretization();
  const auto& scene = disc.scene();
  const auto& wave = scene.wave;
  const double w2mu = wave.omega * wave.omega * wave.mu;
  std::vector<CVec3> out(points.size());
  for (const auto& p : points) {
    if (scene.element_containing(p) >= 0) {
      throw DomainError("scattered_field_at: point inside a scatterer; use the interior field");
    }
  }
#pragma omp parallel for schedule(static)
  for (int q = 0; q < static_cast<int>(points.size()); ++q) {
    CVec3 e = scene.incident(points[q]);
    for (int n = 0; n < disc.element_count(); ++n) {
      const auto A = far_block(scene.scatterers[n], disc.grid(n), points[q], wave);
      for (int m = 0; m < static_cast<int>(A.size()); ++m) {
        e += w2mu * (A[m] * solution.nodal(disc.offset(n) + m));
      }
    }
    out[q] = e;
  }
  return out;
}

}  // namespace nvie

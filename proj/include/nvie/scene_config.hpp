#pragma once

// Scene description in INI form:
//
//   [background]   omega, mu, eps
//   [exclusion]    delta, corrections (true/false), phase (nodal|expanded)
//   [incident]     polarization = 1 0 0     (components may be written (re,im))
//                  direction = 0 -1 0.5     (wave vector in units of k)
//                  or wave_vector = ...     (absolute; takes precedence)
//   [solver]       tolerance, restart, max_iterations
//   [output]       directory, slice_axis, slice_value, resolution, margin
//   [tables]       cache (directory for weight tables, optional)
//   [scatterer N]  shape = cube|sphere, size, center = x y z, delta_eps,
//                  grid = p  (cube)  or  m_r m_theta m_phi  (sphere)
//   [array]        optional generator of a regular block of identical
//                  scatterers: shape, size, delta_eps, grid, counts = nx ny nz,
//                  spacing (gap between neighbours), origin (centre of the block)

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nvie/assembly.hpp"
#include "nvie/scene.hpp"
#include "nvie/solver.hpp"

namespace nvie {

struct OutputConfig {
  std::filesystem::path directory = "nvie_out";
  char slice_axis = 'z';
  double slice_value = 0.0;
  int resolution = 41;
  double margin = 0.25;  // relative to the scene extent
};

struct SceneConfig {
  Scene scene;
  AssemblyOptions assembly;
  SolveConfig solver;
  OutputConfig output;
  std::filesystem::path table_cache;
};

/// Parses INI text; overrides are "section.key=value" strings applied before
/// interpretation. Throws ConfigError (including for overlapping scatterers).
SceneConfig parse_scene_config(std::istream& in, const std::vector<std::string>& overrides = {});
SceneConfig load_scene_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

/// Writes every field with round-trip precision; arrays are written expanded.
void write_scene_config(const SceneConfig& config, std::ostream& out);

}  // namespace nvie

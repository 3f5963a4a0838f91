#include "nvie/scene_config.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nvie/errors.hpp"

namespace nvie {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError(what + ": expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != static_cast<int>(v)) throw ConfigError(what + ": expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

Complex to_complex(const std::string& s, const std::string& what) {
  if (!s.empty() && s.front() == '(') {
    std::istringstream is(s);
    Complex c;
    if (!(is >> c) || is.peek() != std::char_traits<char>::eof()) {
      throw ConfigError(what + ": expected (re,im), got '" + s + "'");
    }
    return c;
  }
  return {to_double(s, what), 0.0};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(Complex c) {
  if (c.imag() == 0) return fmt(c.real());
  return "(" + fmt(c.real()) + "," + fmt(c.imag()) + ")";
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  }
  std::string str(const std::string& path, const std::string& fallback) const {
    return raw(path).value_or(fallback);
  }
  std::string required(const std::string& path) const {
    auto v = raw(path);
    if (!v) throw ConfigError("missing key " + path);
    return *v;
  }
  double num(const std::string& path, double fallback) const {
    auto v = raw(path);
    return v ? to_double(*v, path) : fallback;
  }
  int integer(const std::string& path, int fallback) const {
    auto v = raw(path);
    return v ? to_int(*v, path) : fallback;
  }
  Vec3 vec(const std::string& path, const Vec3& fallback) const {
    auto v = raw(path);
    if (!v) return fallback;
    const auto t = tokens(*v);
    if (t.size() != 3) throw ConfigError(path + ": expected three numbers");
    return {to_double(t[0], path), to_double(t[1], path), to_double(t[2], path)};
  }
  bool flag(const std::string& path, bool fallback) const {
    auto v = raw(path);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(path + ": expected true or false");
  }

 private:
  const pt::ptree& tree_;
};

ReferenceShape parse_shape(const std::string& s, const std::string& what) {
  if (s == "cube") return ReferenceShape::cube;
  if (s == "sphere") return ReferenceShape::sphere;
  throw ConfigError(what + ": unknown shape '" + s + "'");
}

std::array<int, 3> parse_grid(ReferenceShape shape, const std::string& s, const std::string& what) {
  const auto t = tokens(s);
  if (shape == ReferenceShape::cube && t.size() == 1) {
    const int p = to_int(t[0], what);
    return {p, p, p};
  }
  if (t.size() != 3) throw ConfigError(what + ": expected one (cube) or three integers");
  return {to_int(t[0], what), to_int(t[1], what), to_int(t[2], what)};
}

Scatterer parse_scatterer(const Reader& r, const std::string& sec) {
  Scatterer s;
  s.shape = parse_shape(r.required(sec + ".shape"), sec + ".shape");
  s.size = to_double(r.required(sec + ".size"), sec + ".size");
  s.center = r.vec(sec + ".center", Vec3::Zero());
  s.delta_eps = to_complex(r.required(sec + ".delta_eps"), sec + ".delta_eps");
  s.grid_params = parse_grid(s.shape, r.str(sec + ".grid", "3 3 3"), sec + ".grid");
  return s;
}

std::vector<Scatterer> expand_array(const Reader& r) {
  const Scatterer proto = parse_scatterer(r, "array");
  const auto t = tokens(r.required("array.counts"));
  if (t.size() != 3) throw ConfigError("array.counts: expected three integers");
  const std::array<int, 3> n{to_int(t[0], "array.counts"), to_int(t[1], "array.counts"),
                             to_int(t[2], "array.counts")};
  if (*std::min_element(n.begin(), n.end()) < 1) throw ConfigError("array.counts must be positive");
  const double gap = r.num("array.spacing", 0.0);
  const Vec3 origin = r.vec("array.origin", Vec3::Zero());
  const double pitch = (proto.shape == ReferenceShape::cube ? proto.size : 2 * proto.size) + gap;
  std::vector<Scatterer> out;
  for (int iz = 0; iz < n[2]; ++iz)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int ix = 0; ix < n[0]; ++ix) {
        Scatterer s = proto;
        s.center = origin + pitch * Vec3(ix - 0.5 * (n[0] - 1), iy - 0.5 * (n[1] - 1),
                                         iz - 0.5 * (n[2] - 1));
        out.push_back(s);
      }
  return out;
}

}  // namespace

SceneConfig parse_scene_config(std::istream& in, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    tree.put(pt::ptree::path_type(o.substr(0, eq), '.'), o.substr(eq + 1));
  }
  const Reader r(tree);
  SceneConfig c;
  const double omega = r.num("background.omega", 1.0);
  const double mu = r.num("background.mu", 1.0);
  const double eps = r.num("background.eps", 1.0);
  try {
    c.scene.wave = WaveParams<double>::make(omega, mu, eps);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  c.scene.delta = r.num("exclusion.delta", 1e-3);
  c.assembly.corrections = r.flag("exclusion.corrections", true);
  c.assembly.phase =
      parse_self_phase(r.str("exclusion.phase", to_string(AssemblyOptions{}.phase)));

  const auto pol = tokens(r.str("incident.polarization", "1 0 0"));
  if (pol.size() != 3) throw ConfigError("incident.polarization: expected three components");
  for (int a = 0; a < 3; ++a) c.scene.incident.polarization[a] = to_complex(pol[a], "incident.polarization");
  if (r.raw("incident.wave_vector")) {
    c.scene.incident.wave_vector = r.vec("incident.wave_vector", Vec3::Zero());
  } else {
    c.scene.incident.wave_vector = c.scene.wave.k * r.vec("incident.direction", Vec3::UnitZ());
  }

  c.solver.tolerance = r.num("solver.tolerance", c.solver.tolerance);
  c.solver.restart = r.integer("solver.restart", c.solver.restart);
  c.solver.max_iterations = r.integer("solver.max_iterations", c.solver.max_iterations);
  c.solver.validate();

  c.output.directory = r.str("output.directory", c.output.directory.string());
  const std::string axis = r.str("output.slice_axis", "z");
  if (axis.size() != 1 || axis.find_first_of("xyz") != 0) throw ConfigError("output.slice_axis must be x, y or z");
  c.output.slice_axis = axis[0];
  c.output.slice_value = r.num("output.slice_value", c.output.slice_value);
  c.output.resolution = r.integer("output.resolution", c.output.resolution);
  if (c.output.resolution < 2) throw ConfigError("output.resolution must be at least 2");
  c.output.margin = r.num("output.margin", c.output.margin);
  c.table_cache = r.str("tables.cache", "");

  std::vector<std::pair<int, std::string>> sections;
  for (const auto& [name, sub] : tree) {
    if (name.rfind("scatterer", 0) == 0) {
      const std::string num = name.substr(9);
      const auto t = tokens(num);
      if (t.size() != 1) throw ConfigError("section [" + name + "]: expected [scatterer N]");
      sections.emplace_back(to_int(t[0], name), name);
    }
  }
  std::sort(sections.begin(), sections.end());
  for (const auto& [n, name] : sections) c.scene.scatterers.push_back(parse_scatterer(r, name));
  if (tree.get_child_optional("array")) {
    for (auto& s : expand_array(r)) c.scene.scatterers.push_back(s);
  }
  c.scene.validate();
  return c;
}

SceneConfig load_scene_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  return parse_scene_config(in, overrides);
}

void write_scene_config(const SceneConfig& c, std::ostream& out) {
  const auto& w = c.scene.wave;
  out << "[background]\nomega = " << fmt(w.omega) << "\nmu = " << fmt(w.mu)
      << "\neps = " << fmt(w.eps_background) << "\n\n";
  out << "[exclusion]\ndelta = " << fmt(c.scene.delta)
      << "\ncorrections = " << (c.assembly.corrections ? "true" : "false")
      << "\nphase = " << to_string(c.assembly.phase) << "\n\n";
  const auto& inc = c.scene.incident;
  const Vec3& kv = inc.wave_vector;
  out << "[incident]\npolarization = " << fmt(inc.polarization[0]) << ' ' << fmt(inc.polarization[1])
      << ' ' << fmt(inc.polarization[2]) << "\nwave_vector = " << fmt(kv[0]) << ' ' << fmt(kv[1])
      << ' ' << fmt(kv[2]) << "\n\n";
  out << "[solver]\ntolerance = " << fmt(c.solver.tolerance) << "\nrestart = " << c.solver.restart
      << "\nmax_iterations = " << c.solver.max_iterations << "\n\n";
  out << "[output]\ndirectory = " << c.output.directory.string()
      << "\nslice_axis = " << c.output.slice_axis << "\nslice_value = " << fmt(c.output.slice_value)
      << "\nresolution = " << c.output.resolution << "\nmargin = " << fmt(c.output.margin) << "\n\n";
  if (!c.table_cache.empty()) out << "[tables]\ncache = " << c.table_cache.string() << "\n\n";
  for (std::size_t i = 0; i < c.scene.scatterers.size(); ++i) {
    const auto& s = c.scene.scatterers[i];
    out << "[scatterer " << i + 1 << "]\nshape = " << to_string(s.shape) << "\nsize = " << fmt(s.size)
        << "\ncenter = " << fmt(s.center[0]) << ' ' << fmt(s.center[1]) << ' ' << fmt(s.center[2])
        << "\ndelta_eps = " << fmt(s.delta_eps) << "\ngrid = " << s.grid_params[0] << ' '
        << s.grid_params[1] << ' ' << s.grid_params[2] << "\n\n";
  }
}

}  // namespace nvie

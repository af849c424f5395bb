#include "hsoc/errors.hpp"
#include "hsoc/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hsoc {
namespace {

const std::set<std::string, std::less<>> kKeys = {
    "command", "preset", "operator", "a11", "a12", "a22", "a0", "gamma", "g", "method",
    "points", "nu", "bound_a", "bound_b", "n", "sigma", "levels", "ref_factor", "halvings",
    "mesh", "solver", "newton_tol", "seed", "outdir"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE || std::isnan(v))
    throw ConfigError(key, "expected a number, got '" + value + "'");
  return v;
}

long to_integer(const std::string& key, const std::string& value) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  return v;
}

void apply_preset(ExperimentConfig& c, const std::string& preset) {
  if (preset == "custom") return;
  if (preset == "ex61") {
    c.gamma = "segment", c.g = "sin3pix", c.method = 2, c.nu = 1e-2;
  } else if (preset == "ex62") {
    // g has two readings; the file has to pick one.
    c.gamma = "segment", c.g.clear(), c.method = 1, c.nu = 1e-2, c.bound_a = -5, c.bound_b = 5;
  } else if (preset == "ex63") {
    c.gamma = "spiral", c.g = "const:1", c.method = 2, c.nu = 1e-4;
  } else if (preset == "ex64") {
    c.gamma = "spokes", c.g = "const:1", c.method = 1, c.nu = 1e-4;
  } else if (preset == "ex65") {
    c.gamma = "spiral", c.g = "const:1", c.method = 2, c.points = 41, c.nu = 1e-4;
  } else {
    throw ConfigError("preset", "unknown preset '" + preset + "'");
  }
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "command") {
    if (value != "solve" && value != "eoc" && value != "geomcheck" && value != "compare")
      throw ConfigError(key, "expected solve, eoc, geomcheck or compare");
    c.command = value;
  } else if (key == "preset") {
    c.preset = value; // applied before the other keys
  } else if (key == "operator") {
    if (value != "laplace" && value != "custom")
      throw ConfigError(key, "expected laplace or custom");
    c.op = value;
  } else if (key == "a11") {
    c.a11 = to_double(key, value);
  } else if (key == "a12") {
    c.a12 = to_double(key, value);
  } else if (key == "a22") {
    c.a22 = to_double(key, value);
  } else if (key == "a0") {
    c.a0 = to_double(key, value);
  } else if (key == "gamma") {
    c.gamma = value;
  } else if (key == "g") {
    c.g = value;
  } else if (key == "method") {
    c.method = static_cast<int>(to_integer(key, value));
  } else if (key == "points") {
    c.points = static_cast<int>(to_integer(key, value));
  } else if (key == "nu") {
    c.nu = to_double(key, value);
  } else if (key == "bound_a") {
    c.bound_a = to_double(key, value);
  } else if (key == "bound_b") {
    c.bound_b = to_double(key, value);
  } else if (key == "n") {
    c.n = static_cast<int>(to_integer(key, value));
  } else if (key == "sigma") {
    c.sigma = to_double(key, value);
  } else if (key == "levels") {
    std::string list = value;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream in(list);
    c.levels.clear();
    for (std::string item; in >> item;) c.levels.push_back(static_cast<int>(to_integer(key, item)));
  } else if (key == "ref_factor") {
    c.ref_factor = static_cast<int>(to_integer(key, value));
  } else if (key == "halvings") {
    c.halvings = static_cast<int>(to_integer(key, value));
  } else if (key == "mesh") {
    c.mesh = value;
  } else if (key == "solver") {
    if (value != "direct" && value != "krylov") throw ConfigError(key, "expected direct or krylov");
    c.solver = parse_solver_kind(value);
  } else if (key == "newton_tol") {
    c.newton_tol = to_double(key, value);
  } else if (key == "seed") {
    const long s = to_integer(key, value);
    if (s < 0) throw ConfigError(key, "must be nonnegative");
    c.seed = static_cast<unsigned>(s);
  } else if (key == "outdir") {
    c.outdir = value;
  }
}

void validate(const ExperimentConfig& c) {
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) throw ConfigError("nu", "must be positive");
  if (!(c.bound_a < c.bound_b)) throw ConfigError("bound_a", "need bound_a < bound_b");
  if (c.n < 1) throw ConfigError("n", "must be at least 1");
  if (c.sigma < 0.0 || !std::isfinite(c.sigma)) throw ConfigError("sigma", "must be positive");
  if (c.method != 1 && c.method != 2) throw ConfigError("method", "expected 1 or 2");
  if (c.points < 0) throw ConfigError("points", "must be nonnegative");
  if (c.points == 1) throw ConfigError("points", "need at least two points");
  if (c.ref_factor < 2) throw ConfigError("ref_factor", "reference must be strictly finer");
  if (c.halvings < 1) throw ConfigError("halvings", "must be at least 1");
  if (!(c.newton_tol > 0.0)) throw ConfigError("newton_tol", "must be positive");
  if (c.levels.empty()) throw ConfigError("levels", "need at least one level");
  for (std::size_t k = 0; k < c.levels.size(); ++k) {
    if (c.levels[k] < 1) throw ConfigError("levels", "every level must be at least 1");
    if (k > 0 && c.levels[k] != 2 * c.levels[k - 1])
      throw ConfigError("levels", "each level must double the previous one");
  }
  if (c.g.empty()) throw ConfigError("g", "this preset requires g (jump_literal or jump_midflip)");
  try {
    make_surface_data(c.g);
  } catch (const InvalidArgument& e) {
    throw ConfigError("g", e.what());
  }
  const bool polyline = c.gamma.rfind("polyline:", 0) == 0;
  if (polyline && c.method == 1 && c.points == 0)
    throw ConfigError("method", "a polyline has no smooth curve; use method 2");
  if (c.op == "laplace" && (c.entries.count("a11") || c.entries.count("a12") ||
                            c.entries.count("a22") || c.entries.count("a0")))
    throw ConfigError("operator", "coefficients a11, a12, a22, a0 need operator = custom");
  if (c.op == "custom") {
    try {
      EllipticCoefficients::constant_coefficients(c.a11, c.a12, c.a22, c.a0).validate();
    } catch (const Error& e) {
      throw ConfigError("operator", e.what());
    }
  }
  if (c.command == "compare" && polyline)
    throw ConfigError("gamma", "compare needs a smooth curve");
  if (c.command == "geomcheck" && polyline)
    throw ConfigError("gamma", "geomcheck needs a smooth curve");
  if (c.command == "eoc" && !c.mesh.empty())
    throw ConfigError("mesh", "eoc runs on nested structured meshes");
  try {
    make_config_curve(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("gamma", e.what());
  }
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!kKeys.count(key)) throw ConfigError(key, "unknown key");
    if (!entries.emplace(key, value).second) throw ConfigError(key, "given twice");
  }

  ExperimentConfig config;
  config.entries = entries;
  if (auto it = entries.find("preset"); it != entries.end()) apply_preset(config, it->second);
  for (const auto& [key, value] : entries) apply_key(config, key, value);
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("file", "cannot open '" + path + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str());
}

} // namespace hsoc

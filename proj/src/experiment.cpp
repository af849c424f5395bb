#include "hsoc/experiment.hpp"

#include "hsoc/errors.hpp"
#include "hsoc/quadrature.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hsoc {
namespace {

constexpr int kTraceSamples = 200;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string read_file(const std::string& path, const std::string& key) {
  std::ifstream file(path);
  if (!file) throw ConfigError(key, "cannot open '" + path + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return text.str();
}

std::vector<double> parse_params(const std::string& key, std::string_view list) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw ConfigError(key, "bad curve parameter '" + item + "'");
    out.push_back(v);
  }
  return out;
}

bool is_polyline(const ExperimentConfig& config) {
  return config.gamma.rfind("polyline:", 0) == 0;
}

PolygonalCurve config_polyline(const ExperimentConfig& config) {
  return read_polyline_csv(read_file(config.gamma.substr(9), "gamma"));
}

EllipticCoefficients config_coefficients(const ExperimentConfig& config) {
  if (config.op == "custom")
    return EllipticCoefficients::constant_coefficients(config.a11, config.a12, config.a22,
                                                       config.a0);
  return EllipticCoefficients::laplace();
}

ParametricCurve require_curve(const ExperimentConfig& config) {
  auto curve = make_config_curve(config);
  if (!curve) throw ConfigError("gamma", "this command needs a smooth curve");
  return std::move(*curve);
}

std::vector<CurvePoint> trace_curve_points(const ParametricCurve& curve, int count,
                                           std::vector<double>* arclength) {
  std::vector<CurvePoint> out;
  const double total = curve.total_length();
  for (int k = 0; k < count; ++k) {
    const double s_total = total * k / (count - 1);
    double s = s_total;
    int c = 0;
    while (c + 1 < static_cast<int>(curve.num_components()) && s > curve.length(c)) {
      s -= curve.length(c);
      ++c;
    }
    s = std::min(s, curve.length(c));
    out.push_back({c, s / curve.length(c), curve.position(c, curve.parameter_at_arclength(c, s))});
    if (arclength) arclength->push_back(s_total);
  }
  return out;
}

// Smallest radius of curvature over 1024 samples per component, using a
// central difference of the derivative.
double min_curvature_radius(const ParametricCurve& curve) {
  constexpr int kSamples = 1024;
  double best = kInf;
  for (int c = 0; c < static_cast<int>(curve.num_components()); ++c) {
    const CurveComponent& comp = curve.component(c);
    const double span = comp.t_end - comp.t_begin, dt = 1e-5 * span;
    for (int k = 0; k <= kSamples; ++k) {
      const double t = std::clamp(comp.t_begin + span * k / kSamples, comp.t_begin + dt,
                                  comp.t_end - dt);
      const Vec2 d1 = comp.derivative(t);
      const Vec2 d2 = (comp.derivative(t + dt) - comp.derivative(t - dt)) / (2.0 * dt);
      const double curvature = std::abs(cross(d1, d2)) / std::pow(d1.norm(), 3);
      if (curvature > 0.0) best = std::min(best, 1.0 / curvature);
    }
  }
  return best;
}

double point_objective(const LevelSolution& sol, const PointControlData& points) {
  const auto u = sol.result->u.as_field();
  return point_fidelity_value(points, sol.result->y) +
         0.5 * sol.problem.nu * control_inner(*sol.mesh, u, u);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream text;
  writer(text);
  write_text(path, text.str());
}

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  for (const auto& [key, value] : config.entries) j["config"][key] = value;
  j["resolved"] = {{"command", config.command},   {"preset", config.preset},
                   {"operator", config.op},       {"gamma", config.gamma},
                   {"g", config.g},               {"method", config.method},
                   {"points", config.points},     {"nu", config.nu},
                   {"bound_a", config.bound_a},   {"bound_b", config.bound_b},
                   {"n", config.n},               {"sigma", config.sigma},
                   {"levels", config.levels},     {"ref_factor", config.ref_factor},
                   {"halvings", config.halvings}, {"newton_tol", config.newton_tol},
                   {"seed", config.seed}};
  if (config.gamma.rfind("spiral", 0) == 0) {
    const SpiralParams sp;
    j["curve_note"] = "spiral default: rate " + fmt(sp.rate) + ", t_end " + fmt(sp.t_end) +
                      ", angle scale " + fmt(sp.angle_scale) +
                      " (rate 0.327 with k = 1 leaves the unit square)";
  } else if (config.gamma.rfind("spokes", 0) == 0) {
    const SpokesParams sp;
    j["curve_note"] = "spokes default: " + std::to_string(sp.count) + " spokes, radii " +
                      fmt(sp.inner_radius) + " to " + fmt(sp.outer_radius) +
                      " (spoke lengths are a free choice)";
  }
  return j;
}

void write_solution_vtk(std::ostream& out, const LevelSolution& sol) {
  const Mesh2D& mesh = *sol.mesh;
  Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.num_vertices()));
  const Eigen::VectorXd& p = sol.result->p.coefficients();
  for (Eigen::Index v = 0; v < u.size(); ++v)
    u[v] = std::clamp(-p[v] / sol.problem.nu, sol.problem.lower, sol.problem.upper);
  write_vtk(out, mesh, {{"y", sol.result->y.coefficients()}, {"p", p}, {"u", u}});
}

int run_solve(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  LevelSolution sol = solve_level(config, config.n);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_with(dir / "solution.vtk", [&](std::ostream& o) { write_solution_vtk(o, sol); });
  write_with(dir / "convergence.csv",
             [&](std::ostream& o) { write_history_csv(o, sol.result->residual_history); });
  if (sol.assembly)
    write_with(dir / "sub_segments.csv",
               [&](std::ostream& o) { write_sub_segments_csv(o, *sol.assembly); });
  if (sol.points)
    write_with(dir / "points.csv", [&](std::ostream& o) { write_point_control_csv(o, *sol.points); });

  double trace_dev = -1.0;
  if (auto curve = make_config_curve(config)) {
    std::vector<double> s;
    const auto pts = trace_curve_points(*curve, kTraceSamples, &s);
    const SurfaceData g = make_surface_data(config.g);
    std::ostringstream o;
    o << "arclength,x1,x2,y_h,g\n";
    double sum = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double y = sol.result->y.evaluate(pts[k].x);
      const double gv = g.value(pts[k]);
      sum += std::abs(y - gv);
      o << fmt(s[k]) << ',' << fmt(pts[k].x.x()) << ',' << fmt(pts[k].x.y()) << ',' << fmt(y)
        << ',' << fmt(gv) << '\n';
    }
    trace_dev = sum / static_cast<double>(pts.size());
    write_text(dir / "trace.csv", o.str());
  }

  auto meta = config_json(config);
  meta["h"] = sol.h;
  meta["sigma"] = sol.sigma;
  meta["vertices"] = sol.mesh->num_vertices();
  meta["interior_dofs"] = sol.mesh->num_interior();
  meta["iterations"] = sol.result->iterations;
  meta["final_residual"] = sol.result->residual_history.back();
  meta["objective"] = sol.objective;
  meta["u_l2_norm"] = sol.u_norm;
  meta["active_lower"] = sol.result->active_lower.size();
  meta["active_upper"] = sol.result->active_upper.size();
  if (trace_dev >= 0.0) meta["trace_mean_abs_deviation"] = trace_dev;
  meta["elapsed_seconds"] = seconds;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");

  log << "solve: n=" << config.n << " h=" << fmt(sol.h) << " iterations=" << sol.result->iterations
      << " objective=" << fmt(sol.objective) << " ||u||=" << fmt(sol.u_norm) << '\n';
  return 0;
}

int run_eoc(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& log) {
  const EocStudy study = eoc_study(config, &log);
  write_with(dir / "eoc.csv", [&](std::ostream& o) { write_eoc_csv(o, study); });
  auto meta = config_json(config);
  meta["reference_n"] = study.reference_n;
  meta["reference_iterations"] = study.reference_iterations;
  for (const auto& row : study.rows) meta["iterations"].push_back(row.iterations);
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  return 0;
}

int run_geomcheck(const ExperimentConfig& config, const std::filesystem::path& dir,
                  std::ostream& log) {
  const auto rows = geometry_study(config);
  write_with(dir / "geometry.csv", [&](std::ostream& o) { write_geometry_csv(o, rows); });
  write_text(dir / "metadata.json", config_json(config).dump(2) + "\n");
  for (const auto& r : rows)
    log << "sigma=" << fmt(r.sigma) << " sup_distance=" << fmt(r.report.sup_distance)
        << " measure_dev=" << fmt(r.report.measure_quotient_dev)
        << " data_error=" << fmt(r.report.data_interp_error) << '\n';
  return 0;
}

int run_compare(const ExperimentConfig& config, const std::filesystem::path& dir,
                std::ostream& log) {
  const Comparison cmp = comparison_study(config, &log);
  write_with(dir / "compare.csv", [&](std::ostream& o) { write_compare_csv(o, cmp); });
  write_with(dir / "trace.csv", [&](std::ostream& o) { write_trace_csv(o, cmp); });
  write_text(dir / "metadata.json", config_json(config).dump(2) + "\n");
  return 0;
}

} // namespace

SurfaceData make_surface_data(std::string_view name) {
  if (name == "sin3pix") return sin3pix_data();
  if (name == "jump_literal") return jump_literal_data();
  if (name == "jump_midflip") return jump_midflip_data();
  if (name.rfind("const:", 0) == 0) {
    const std::string value(name.substr(6));
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(v))
      throw InvalidArgument("bad constant '" + value + "'");
    return constant_data(v);
  }
  throw InvalidArgument("unknown data '" + std::string(name) + "'");
}

std::optional<ParametricCurve> make_config_curve(const ExperimentConfig& config) {
  if (is_polyline(config)) return std::nullopt;
  const std::string& gamma = config.gamma;
  const auto colon = gamma.find(':');
  const std::string kind = gamma.substr(0, colon);
  const std::vector<double> params =
      colon == std::string::npos ? std::vector<double>{} : parse_params("gamma", gamma.substr(colon + 1));
  if (kind != "segment" && kind != "circle" && kind != "spiral" && kind != "spokes")
    throw ConfigError("gamma", "unknown curve '" + gamma + "'");
  try {
    return make_builtin_curve(kind, params);
  } catch (const InvalidArgument& e) {
    throw ConfigError("gamma", e.what());
  }
}

std::unique_ptr<Mesh2D> make_config_mesh(const ExperimentConfig& config, int n) {
  if (config.mesh.empty()) return std::make_unique<Mesh2D>(build_structured_mesh(n));
  const std::string node = read_file(config.mesh + ".node", "mesh");
  const std::string ele = read_file(config.mesh + ".ele", "mesh");
  try {
    return std::make_unique<Mesh2D>(import_triangle_mesh(node, ele));
  } catch (const ParseError& e) {
    throw ConfigError("mesh", e.what());
  } catch (const ValidationError& e) {
    throw ConfigError("mesh", e.what());
  }
}

LevelSolution solve_with_fidelity(const ExperimentConfig& config,
                                  std::shared_ptr<const Mesh2D> mesh,
                                  FidelityTerm fidelity) {
  LevelSolution sol;
  sol.mesh = std::move(mesh);
  sol.h = sol.mesh->h_max();
  sol.sigma = config.sigma > 0.0 ? config.sigma : sol.h;
  sol.problem.coeffs = config_coefficients(config);
  sol.problem.fidelity = std::move(fidelity);
  sol.problem.nu = config.nu;
  sol.problem.lower = config.bound_a;
  sol.problem.upper = config.bound_b;

  NewtonOptions options;
  options.tol = config.newton_tol;
  options.solver = config.solver;
  sol.result.emplace(semismooth_newton(sol.problem, *sol.mesh, options));

  const auto u = sol.result->u.as_field();
  sol.objective = fidelity_value(sol.problem.fidelity, sol.result->y) +
                  0.5 * config.nu * control_inner(*sol.mesh, u, u);
  sol.u_norm = l2_norm(*sol.mesh, u);
  return sol;
}

LevelSolution solve_level(const ExperimentConfig& config, int n) {
  auto mesh = make_config_mesh(config, n);
  const double h = mesh->h_max();
  const double sigma = config.sigma > 0.0 ? config.sigma : h;
  const SurfaceData g = make_surface_data(config.g);

  std::optional<SurfaceAssembly> assembly;
  std::optional<PointControlData> points;
  FidelityTerm term;
  if (config.points > 0) {
    points = evenly_spaced_points(require_curve(config), config.points, 1.0, g, true);
    term = point_fidelity_term(*mesh, *points);
  } else if (is_polyline(config)) {
    const PolygonalCurve polygon = config_polyline(config);
    assembly = assemble_polygon_terms(*mesh, polygon, interpolate_surface_data(nullptr, polygon, g));
    term = *assembly;
  } else {
    assembly = assemble_surface_terms(*mesh, require_curve(config), g,
                                      static_cast<FidelityMethod>(config.method), sigma);
    term = *assembly;
  }
  LevelSolution sol = solve_with_fidelity(config, std::move(mesh), std::move(term));
  sol.assembly = std::move(assembly);
  sol.points = std::move(points);
  return sol;
}

double control_distance(const LevelSolution& reference, const LevelSolution& other) {
  const Mesh2D& mesh = *reference.mesh;
  const bool same_mesh = reference.mesh.get() == other.mesh.get();
  const auto& rule = triangle_rule(6);
  double sum = 0.0;
  int hint = -1;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2];
      const double uo = same_mesh ? other.result->u.evaluate(t, q.bary)
                                  : other.result->u.evaluate(x, &hint);
      const double d = reference.result->u.evaluate(t, q.bary) - uo;
      sum += q.weight * area * d * d;
    }
  }
  return std::sqrt(sum);
}

EocStudy eoc_study(const ExperimentConfig& config, std::ostream* log) {
  EocStudy study;
  study.reference_n = config.ref_factor * config.levels.back();
  const LevelSolution reference = solve_level(config, study.reference_n);
  study.reference_iterations = reference.result->iterations;
  if (log)
    *log << "reference n=" << study.reference_n << " iterations=" << reference.result->iterations
         << " ||u||=" << fmt(reference.u_norm) << std::endl;

  std::vector<double> errors;
  for (int n : config.levels) {
    const LevelSolution level = solve_level(config, n);
    EocRow row;
    row.h = level.h;
    row.dofs = level.mesh->num_vertices();
    row.error = control_distance(reference, level);
    row.iterations = level.result->iterations;
    errors.push_back(row.error);
    study.rows.push_back(row);
    if (log)
      *log << "level n=" << n << " iterations=" << row.iterations << " error=" << fmt(row.error)
           << std::endl;
  }
  if (errors.size() >= 2) {
    const auto rates = eoc(errors, 2.0);
    for (std::size_t k = 0; k < rates.size(); ++k) study.rows[k + 1].eoc = rates[k];
  }
  return study;
}

std::vector<GeometryRow> geometry_study(const ExperimentConfig& config) {
  const ParametricCurve curve = require_curve(config);
  const SurfaceData g = make_surface_data(config.g);
  double shortest = curve.length(0);
  for (int c = 1; c < static_cast<int>(curve.num_components()); ++c)
    shortest = std::min(shortest, curve.length(c));
  const double sigma0 =
      config.sigma > 0.0 ? config.sigma : std::min(shortest / 16.0, min_curvature_radius(curve));

  std::vector<GeometryRow> rows;
  for (int k = 0; k <= config.halvings; ++k) {
    GeometryRow row;
    row.sigma = sigma0 / std::pow(2.0, k);
    const PolygonalCurve polygon = polygonal_interpolation(curve, row.sigma);
    try {
      row.report = geometry_report(curve, polygon, g);
    } catch (const CoveringError& e) {
      throw CoveringError(std::string(e.what()) + " (sigma " + fmt(row.sigma) + ")");
    }
    if (!rows.empty()) {
      const GeometryReport& prev = rows.back().report;
      auto order = [](double a, double b) {
        return a > 0.0 && b > 0.0 ? std::log2(a / b) : 0.0;
      };
      row.order = {order(prev.sup_distance, row.report.sup_distance),
                   order(prev.measure_quotient_dev, row.report.measure_quotient_dev),
                   order(prev.data_interp_error, row.report.data_interp_error)};
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> trace_state(const LevelSolution& solution, const ParametricCurve& curve,
                                int count, std::vector<double>* arclength,
                                std::vector<Vec2>* points) {
  std::vector<double> values;
  for (const CurvePoint& cp : trace_curve_points(curve, count, arclength)) {
    values.push_back(solution.result->y.evaluate(cp.x));
    if (points) points->push_back(cp.x);
  }
  return values;
}

Comparison comparison_study(const ExperimentConfig& config, std::ostream* log) {
  const ParametricCurve curve = require_curve(config);
  const SurfaceData g = make_surface_data(config.g);
  const std::shared_ptr<const Mesh2D> shared_mesh = make_config_mesh(config, config.n);
  const double h = shared_mesh->h_max();
  const double sigma = config.sigma > 0.0 ? config.sigma : h;

  // Line problem with the configured method, plus a Method 2 assembly for the
  // Simpson reduction (the same one when the line already uses Method 2).
  const SurfaceAssembly line_asm = assemble_surface_terms(
      *shared_mesh, curve, g, static_cast<FidelityMethod>(config.method), sigma);
  const SurfaceAssembly polygon_asm =
      config.method == 2 ? line_asm
                         : assemble_surface_terms(*shared_mesh, curve, g,
                                                  FidelityMethod::PolygonalCurve, sigma);

  const int count41 = config.points > 0 ? config.points : 41;
  const PointControlData points41 = evenly_spaced_points(curve, count41, 1.0, g, true);
  const int count_h = static_cast<int>(std::ceil(curve.total_length() / h - 1e-12));
  const PointControlData weighted = evenly_spaced_points(curve, std::max(count_h, 2), h, g, false);
  const PointControlData simpson = reduce_to_point_control(polygon_asm);

  struct Mode {
    std::string name;
    const PointControlData* points;
    FidelityTerm term;
  };
  std::vector<Mode> modes;
  modes.push_back({"line", nullptr, line_asm});
  modes.push_back({"points" + std::to_string(count41), &points41,
                   point_fidelity_term(*shared_mesh, points41)});
  modes.push_back({"hweighted", &weighted, point_fidelity_term(*shared_mesh, weighted)});
  modes.push_back({"simpson", &simpson, point_fidelity_term(*shared_mesh, simpson)});

  Comparison out;
  const auto trace_pts = trace_curve_points(curve, kTraceSamples, &out.trace_arclength);
  for (const auto& cp : trace_pts) out.trace_points.push_back(cp.x);

  std::vector<LevelSolution> sols;
  for (auto& mode : modes) {
    sols.push_back(solve_with_fidelity(config, shared_mesh, mode.term));
    const LevelSolution& sol = sols.back();
    CompareMode row;
    row.name = mode.name;
    row.point_count = mode.points ? mode.points->points.size() : 0;
    row.iterations = sol.result->iterations;
    row.u_norm = sol.u_norm;
    row.objective = mode.points ? point_objective(sol, *mode.points) : sol.objective;
    row.distance_to_line = control_distance(sols.front(), sol);
    std::vector<double> trace;
    double dev = 0.0;
    for (const auto& cp : trace_pts) {
      trace.push_back(sol.result->y.evaluate(cp.x));
      dev += std::abs(trace.back() - g.value(cp));
    }
    row.mean_abs_deviation = dev / static_cast<double>(trace_pts.size());
    out.trace_values.push_back(std::move(trace));
    out.modes.push_back(row);
    if (log)
      *log << "compare " << row.name << ": points=" << row.point_count
           << " ||u||=" << fmt(row.u_norm) << " objective=" << fmt(row.objective) << std::endl;
  }
  return out;
}

void write_eoc_csv(std::ostream& out, const EocStudy& study) {
  out << "h,dofs,error,eoc\n";
  for (const auto& r : study.rows)
    out << fmt(r.h) << ',' << r.dofs << ',' << fmt(r.error) << ',' << fmt(r.eoc) << '\n';
}

void write_geometry_csv(std::ostream& out, const std::vector<GeometryRow>& rows) {
  out << "sigma,sup_distance,measure_quotient_dev,data_interp_error,"
         "order_sup_distance,order_measure_quotient_dev,order_data_interp_error\n";
  for (const auto& r : rows)
    out << fmt(r.sigma) << ',' << fmt(r.report.sup_distance) << ','
        << fmt(r.report.measure_quotient_dev) << ',' << fmt(r.report.data_interp_error) << ','
        << fmt(r.order[0]) << ',' << fmt(r.order[1]) << ',' << fmt(r.order[2]) << '\n';
}

void write_compare_csv(std::ostream& out, const Comparison& comparison) {
  out << "mode,points,iterations,u_l2_norm,objective,distance_to_line,mean_abs_deviation\n";
  for (const auto& m : comparison.modes)
    out << m.name << ',' << m.point_count << ',' << m.iterations << ',' << fmt(m.u_norm) << ','
        << fmt(m.objective) << ',' << fmt(m.distance_to_line) << ','
        << fmt(m.mean_abs_deviation) << '\n';
}

void write_trace_csv(std::ostream& out, const Comparison& comparison) {
  out << "arclength,x1,x2";
  for (const auto& m : comparison.modes) out << ",y_" << m.name;
  for (std::size_t k = 1; k < comparison.modes.size(); ++k)
    out << ",diff_" << comparison.modes[k].name;
  out << '\n';
  for (std::size_t i = 0; i < comparison.trace_arclength.size(); ++i) {
    out << fmt(comparison.trace_arclength[i]) << ',' << fmt(comparison.trace_points[i].x()) << ','
        << fmt(comparison.trace_points[i].y());
    for (const auto& values : comparison.trace_values) out << ',' << fmt(values[i]);
    for (std::size_t k = 1; k < comparison.trace_values.size(); ++k)
      out << ',' << fmt(comparison.trace_values[k][i] - comparison.trace_values[0][i]);
    out << '\n';
  }
}

void write_history_csv(std::ostream& out, const std::vector<double>& history) {
  out << "iteration,residual\n";
  for (std::size_t k = 0; k < history.size(); ++k) out << k << ',' << fmt(history[k]) << '\n';
}

int run_command(const ExperimentConfig& config, std::ostream& log) {
  try {
    const std::filesystem::path dir(config.outdir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("outdir", "cannot create '" + config.outdir + "'");
    if (config.command == "solve") return run_solve(config, dir, log);
    if (config.command == "eoc") return run_eoc(config, dir, log);
    if (config.command == "geomcheck") return run_geomcheck(config, dir, log);
    if (config.command == "compare") return run_compare(config, dir, log);
    throw ConfigError("command", "unknown command '" + config.command + "'");
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NonconvergenceError& e) {
    log << "nonconvergence: " << e.what() << '\n';
    std::ofstream hist(std::filesystem::path(config.outdir) / "convergence.csv");
    write_history_csv(hist, e.history());
    return 3;
  } catch (const SolverError& e) {
    log << "linear solver failure: " << e.what() << '\n';
    return 3;
  } catch (const CoveringError& e) {
    log << "covering error: " << e.what() << '\n';
    return 4;
  } catch (const AmbiguityError& e) {
    log << "ambiguous projection: " << e.what() << '\n';
    return 4;
  } catch (const LocateError& e) {
    log << "geometry error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_config_file(const std::string& path, std::ostream& log) {
  ExperimentConfig config;
  try {
    config = load_config(path);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 2;
  }
  return run_command(config, log);
}

} // namespace hsoc

#pragma once

#include "hsoc/fidelity.hpp"
#include "hsoc/optimizer.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsoc {

/// Settings of one experiment, read from a flat `key = value` file.
struct ExperimentConfig {
  std::string command = "solve"; // solve | eoc | geomcheck | compare
  std::string preset = "custom"; // ex61 .. ex65 | custom

  std::string op = "laplace"; // laplace | custom (constant a11, a12, a22, a0)
  double a11 = 1.0, a12 = 0.0, a22 = 1.0, a0 = 0.0;

  std::string gamma = "segment"; // segment | circle[:r] | spiral[:rate,t_end,k] | spokes | polyline:<path>
  std::string g = "const:1";     // sin3pix | jump_literal | jump_midflip | const:<v>
  int method = 2;
  int points = 0; // > 0 replaces the curve fidelity by this many unit-weight points

  double nu = 1e-2;
  double bound_a = -kInf;
  double bound_b = kInf;

  int n = 32;
  double sigma = 0.0; // 0 means sigma = h
  std::vector<int> levels{4, 8, 16, 32, 64, 128};
  int ref_factor = 4;
  int halvings = 4;
  std::string mesh; // Triangle file prefix; empty for the structured mesh

  SolverKind solver = SolverKind::Direct;
  double newton_tol = 1e-8;
  unsigned seed = 0;
  std::string outdir = ".";

  /// Keys exactly as they appeared in the file, for metadata.
  std::map<std::string, std::string> entries;
};

/// Parses and validates a configuration. Presets are applied first and
/// explicit keys override them. Throws ConfigError naming the key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

SurfaceData make_surface_data(std::string_view name);
/// Smooth curve named by `gamma`; std::nullopt for polylines.
std::optional<ParametricCurve> make_config_curve(const ExperimentConfig& config);
/// Mesh of the experiment: structured with `n` cells per side unless a
/// Triangle prefix is configured.
std::unique_ptr<Mesh2D> make_config_mesh(const ExperimentConfig& config, int n);

/// One solved problem. The mesh lives on the heap so the solution, which
/// refers to it, stays valid when the struct moves; several solutions may
/// share one mesh.
struct LevelSolution {
  std::shared_ptr<const Mesh2D> mesh;
  ControlProblem problem;
  std::optional<SurfaceAssembly> assembly; // line problems
  std::optional<PointControlData> points;  // point problems
  double h = 0.0;
  double sigma = 0.0;
  std::optional<SolveResult> result;
  double objective = 0.0;
  double u_norm = 0.0;
};

LevelSolution solve_level(const ExperimentConfig& config, int n);
/// Solves with an explicitly given fidelity on the mesh.
LevelSolution solve_with_fidelity(const ExperimentConfig& config,
                                  std::shared_ptr<const Mesh2D> mesh,
                                  FidelityTerm fidelity);

/// L2 distance of two controls, integrated on the mesh of `reference`.
double control_distance(const LevelSolution& reference, const LevelSolution& other);

struct EocRow {
  double h = 0.0;
  std::size_t dofs = 0; // all mesh vertices, boundary included
  double error = 0.0;
  double eoc = 0.0;
  int iterations = 0;
};

struct EocStudy {
  std::vector<EocRow> rows;
  int reference_n = 0;
  int reference_iterations = 0;
};

EocStudy eoc_study(const ExperimentConfig& config, std::ostream* log = nullptr);

struct GeometryRow {
  double sigma = 0.0;
  GeometryReport report;
  std::array<double, 3> order{}; // observed orders against the previous row; 0 on the first
};

std::vector<GeometryRow> geometry_study(const ExperimentConfig& config);

struct CompareMode {
  std::string name;
  std::size_t point_count = 0;
  int iterations = 0;
  double u_norm = 0.0;
  double objective = 0.0;
  double distance_to_line = 0.0;     // ||u - u_line||
  double mean_abs_deviation = 0.0; // mean |y_h - g| over the trace samples
};

struct Comparison {
  std::vector<CompareMode> modes; // line, points41, hweighted, simpson
  std::vector<double> trace_arclength;
  std::vector<Vec2> trace_points;
  std::vector<std::vector<double>> trace_values; // per mode
};

Comparison comparison_study(const ExperimentConfig& config, std::ostream* log = nullptr);

/// y_h at `count` equal-arclength points along the curve, ends included.
std::vector<double> trace_state(const LevelSolution& solution, const ParametricCurve& curve,
                                int count, std::vector<double>* arclength = nullptr,
                                std::vector<Vec2>* points = nullptr);

void write_eoc_csv(std::ostream& out, const EocStudy& study);
void write_geometry_csv(std::ostream& out, const std::vector<GeometryRow>& rows);
void write_compare_csv(std::ostream& out, const Comparison& comparison);
void write_trace_csv(std::ostream& out, const Comparison& comparison);
void write_history_csv(std::ostream& out, const std::vector<double>& history);

/// Runs the configured command, writing artifacts into `outdir`. Returns the
/// process exit code: 0 success, 2 configuration error, 3 nonconvergence,
/// 4 geometry or covering error, 1 anything else.
int run_command(const ExperimentConfig& config, std::ostream& log);
/// Loads the file and runs it, mapping configuration errors to exit code 2.
int run_config_file(const std::string& path, std::ostream& log);

} // namespace hsoc

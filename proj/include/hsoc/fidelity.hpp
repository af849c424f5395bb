#pragma once

#include "hsoc/fem.hpp"
#include "hsoc/geometry.hpp"

#include <iosfwd>
#include <optional>

namespace hsoc {

/// Curve fidelity discretizations.
enum class FidelityMethod {
  ExactCurve = 1,     // integrate along the smooth curve with Gauss quadrature
  PolygonalCurve = 2, // integrate along the interpolating polygon with Simpson's rule
};

/// Piece of the curve (or polygon) inside a single triangle.
struct SubSegment {
  int triangle = -1;
  int component = 0;
  std::array<double, 3> bary_start{};
  std::array<double, 3> bary_end{};
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  double length = 0.0;
  double t_start = 0.0; // curve parameter (method 1) or polygon parameter (method 2)
  double t_end = 0.0;
  double g_start = 0.0; // polygonal data at the end points (method 2)
  double g_end = 0.0;
};

/// Discrete fidelity 1/2 (y M y - 2 y.G + g_const), indexed over all mesh vertices.
struct FidelityTerm {
  SparseMatrix M;
  Eigen::VectorXd G;
  double g_const = 0.0;
};

struct SurfaceAssembly : FidelityTerm {
  FidelityMethod method = FidelityMethod::PolygonalCurve;
  std::vector<SubSegment> sub_segments;
};

/// Optional weight multiplying the curve measure.
using MeasureWeight = std::function<double(const Vec2&)>;

/// Polygonal fidelity: each polygon segment is split at triangle edges and
/// the piecewise-quadratic integrands are integrated exactly with Simpson's
/// rule. `nodal_g[c][k]` is the data value at vertex k of component c.
SurfaceAssembly assemble_polygon_terms(const Mesh2D& mesh, const PolygonalCurve& polygon,
                                       const std::vector<std::vector<double>>& nodal_g,
                                       const MeasureWeight& weight = {});

/// Exact-curve fidelity: the smooth curve is split where it crosses triangle
/// edges (and at data jumps) and integrated with `gauss_order`-point Gauss in
/// the curve parameter.
SurfaceAssembly assemble_curve_terms(const Mesh2D& mesh, const ParametricCurve& curve,
                                     const SurfaceData& g, int gauss_order = 8,
                                     const MeasureWeight& weight = {});

/// Either method for a smooth curve; method 2 interpolates the curve with
/// chords of length at most `sigma` and interpolates g at the vertices.
SurfaceAssembly assemble_surface_terms(const Mesh2D& mesh, const ParametricCurve& curve,
                                       const SurfaceData& g, FidelityMethod method, double sigma,
                                       int gauss_order = 8);

/// Weighted point evaluations equivalent to the curve fidelity.
struct PointControlData {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<double> values;

  double total_weight() const;
};

/// Simpson nodes of every sub-segment; coincident nodes (within 1e-12) are
/// merged with their weights summed. Requires a polygonal assembly.
PointControlData reduce_to_point_control(const SurfaceAssembly& assembly);

/// `count` points at equal arclength spacing along the whole curve, all with
/// the same weight. With `include_ends` the first and last points are the
/// curve ends; otherwise points sit at the centres of `count` equal pieces.
/// Data values are g at the points.
PointControlData evenly_spaced_points(const ParametricCurve& curve, int count, double weight,
                                      const SurfaceData& g, bool include_ends = true);

/// Fidelity matrices of the point problem: M = sum w phi(x) phi(x)^T etc.
FidelityTerm point_fidelity_term(const Mesh2D& mesh, const PointControlData& points);

/// 1/2 (y M y - 2 y.G + g_const).
double fidelity_value(const FidelityTerm& term, const FeFunction& y);

/// 1/2 sum_i w_i (y(x_i) - g_i)^2, evaluated pointwise.
double point_fidelity_value(const PointControlData& points, const FeFunction& y);

void write_sub_segments_csv(std::ostream& out, const SurfaceAssembly& assembly);
void write_point_control_csv(std::ostream& out, const PointControlData& points);

} // namespace hsoc

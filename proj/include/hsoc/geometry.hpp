#pragma once

#include "hsoc/mesh.hpp"

#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsoc {

/// One connected piece of a smooth curve, parametrized over [t_begin, t_end].
struct CurveComponent {
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> derivative;
  double t_begin = 0.0;
  double t_end = 1.0;
  bool closed = false;
};

/// Smooth curve made of one or more regular components inside the open unit
/// square. Arclength is tabulated with 16-point Gauss on 256 sub-intervals.
class ParametricCurve {
public:
  /// Throws InvalidArgument if a component is not regular or comes within
  /// 1e-6 of the boundary of the square.
  ParametricCurve(std::string name, std::vector<CurveComponent> components);

  const std::string& name() const { return name_; }
  std::size_t num_components() const { return components_.size(); }
  const CurveComponent& component(int c) const { return components_[c]; }

  Vec2 position(int c, double t) const { return components_[c].position(t); }
  Vec2 derivative(int c, double t) const { return components_[c].derivative(t); }
  /// Unit normal: the tangent rotated counterclockwise by 90 degrees.
  Vec2 normal(int c, double t) const;

  double length(int c) const { return tables_[c].back(); }
  double total_length() const;
  /// Arclength from t_begin to t.
  double arclength_at(int c, double t) const;
  /// Inverse of arclength_at.
  double parameter_at_arclength(int c, double s) const;

private:
  double sub_width(int c) const;

  std::string name_;
  std::vector<CurveComponent> components_;
  std::vector<std::vector<double>> tables_; // cumulative arclength per sub-interval
};

inline constexpr int kArclengthIntervals = 256;

/// Spiral (0.5 + rate t sin(k t), 0.5 + rate t cos(k t)) for t in [0, t_end].
/// With rate 0.327 and k = 1 the curve leaves the unit square for t > 1.53,
/// so the default keeps t_end and reaches radius 0.46 after 1.58 turns.
struct SpiralParams {
  double rate = 0.46 / 3.159;
  double t_end = 3.159;
  double angle_scale = std::numbers::pi;

  static SpiralParams unit_angle() { return {0.327, 3.159, 1.0}; }
};

/// Position map of the spiral; defined for any t, inside the square or not.
Vec2 spiral_position(const SpiralParams& params, double t);

/// Spokes: `count` open radial segments around (0.5, 0.5).
struct SpokesParams {
  int count = 6;
  double inner_radius = 0.02;
  double outer_radius = 0.4;
};

ParametricCurve make_segment_curve();
ParametricCurve make_circle_curve(double radius, Vec2 center = Vec2(0.5, 0.5));
ParametricCurve make_spiral_curve(const SpiralParams& params = {});
ParametricCurve make_spokes_curve(const SpokesParams& params = {});

/// Dispatch by name: "segment" (no params), "circle" (radius),
/// "spiral" (rate, t_end, angle_scale), "spokes" (count, inner, outer).
/// Missing trailing params take their defaults.
ParametricCurve make_builtin_curve(std::string_view kind, std::span<const double> params = {});

struct PolylineComponent {
  std::vector<Vec2> vertices;
  /// Curve parameter of each vertex (cumulative chord length when there is no
  /// underlying smooth curve).
  std::vector<double> params;
  bool closed = false;

  std::size_t num_segments() const { return vertices.size() - 1; }
  double length() const;
};

/// Interpolating polygonal curve; every vertex lies on the smooth curve.
struct PolygonalCurve {
  std::vector<PolylineComponent> components;
  double sigma = 0.0; // longest chord
  bool has_smooth_curve = true;

  double total_length() const;
};

/// Equal-arclength interpolation with ceil(length / sigma_target) segments per
/// component.
PolygonalCurve polygonal_interpolation(const ParametricCurve& curve, double sigma_target);

/// Polyline given directly, with no smooth curve behind it.
PolygonalCurve polygon_from_points(std::vector<std::vector<Vec2>> components);

/// Reads a two-column CSV of vertices; blank lines separate components.
PolygonalCurve read_polyline_csv(std::string_view text);

struct CurveProjection {
  int component = 0;
  double t = 0.0;
  Vec2 foot = Vec2::Zero();
  double distance = 0.0; // signed, along the unit normal
};

/// Nearest point on the curve. Throws AmbiguityError when the second-nearest
/// local minimum is not at least twice as far.
CurveProjection closest_point(const ParametricCurve& curve, const Vec2& x);

/// Intersection of the normal line through a curve point with the polygon.
struct LiftPoint {
  int segment = 0;
  double lambda = 0.0; // position along the segment chord, in [0, 1]
  Vec2 point = Vec2::Zero();
  double offset = 0.0; // signed distance from the curve point along the normal
};

/// Throws CoveringError when the normal line misses the nearby polygon segments.
LiftPoint lift_point(const ParametricCurve& curve, const PolygonalCurve& polygon,
                     int component, double t);

struct CurveParam {
  int component = 0;
  double t = 0.0;
};

/// Values of `f` (defined on the polygon) pulled back to the given curve points.
std::vector<double> lift_values(const ParametricCurve& curve, const PolygonalCurve& polygon,
                                const std::function<double(const Vec2&)>& f,
                                std::span<const CurveParam> params);

double sup_distance(const ParametricCurve& curve, const PolygonalCurve& polygon,
                    int samples_per_segment = 16);

double measure_quotient_dev(const ParametricCurve& curve, const PolygonalCurve& polygon);

/// A point on the curve as seen by data functions. `fraction` is the
/// arclength fraction along the component.
struct CurvePoint {
  int component = 0;
  double fraction = 0.0;
  Vec2 x = Vec2::Zero();
};

/// Data g on the curve; `jump_fractions` lists arclength fractions where g
/// is discontinuous, so integrators can break there.
struct SurfaceData {
  std::string name;
  std::function<double(const CurvePoint&)> value;
  std::vector<double> jump_fractions;
};

SurfaceData constant_data(double v);
SurfaceData sin3pix_data();
/// g = 1 for x1 < 0 and -1 otherwise (constant -1 on curves inside the square).
SurfaceData jump_literal_data();
/// g = 1 before the arclength midpoint of each component and -1 after it.
SurfaceData jump_midflip_data();

/// Nodal values of the Lagrange interpolant of g on the polygon vertices.
std::vector<std::vector<double>> interpolate_surface_data(const ParametricCurve* curve,
                                                          const PolygonalCurve& polygon,
                                                          const SurfaceData& g);

/// L2(curve) norm of g minus the lift of its polygonal interpolant.
double data_interp_error(const ParametricCurve& curve, const PolygonalCurve& polygon,
                         const SurfaceData& g);

struct GeometryReport {
  double sup_distance = 0.0;
  double measure_quotient_dev = 0.0;
  double data_interp_error = 0.0;
};

GeometryReport geometry_report(const ParametricCurve& curve, const PolygonalCurve& polygon,
                               const SurfaceData& g, int samples_per_segment = 16);

} // namespace hsoc

#include "hsoc/geometry.hpp"

#include "hsoc/errors.hpp"
#include "hsoc/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

namespace hsoc {
namespace {

constexpr double kInsideMargin = 1e-6;
constexpr int kRegularitySamples = 1024;

// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs.
template <typename F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(53), max_iter);
  return 0.5 * (a + b);
}

} // namespace

ParametricCurve::ParametricCurve(std::string name, std::vector<CurveComponent> components)
    : name_(std::move(name)), components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("curve needs at least one component");
  const GaussRule& gauss = gauss_legendre(16);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    if (!(comp.t_end > comp.t_begin))
      throw InvalidArgument("curve component needs t_end > t_begin");
    for (int k = 0; k <= kRegularitySamples; ++k) {
      const double t = comp.t_begin + (comp.t_end - comp.t_begin) * k / kRegularitySamples;
      const Vec2 p = comp.position(t);
      if (!(comp.derivative(t).norm() > 0.0))
        throw InvalidArgument("curve '" + name_ + "' is not regular at t=" + std::to_string(t));
      const double margin = std::min({p.x(), 1.0 - p.x(), p.y(), 1.0 - p.y()});
      if (!(margin >= kInsideMargin)) {
        std::ostringstream msg;
        msg << "curve '" << name_ << "' leaves the unit square (point (" << p.x() << ", "
            << p.y() << ") at t=" << t << ")";
        throw InvalidArgument(msg.str());
      }
    }
    std::vector<double> table(kArclengthIntervals + 1, 0.0);
    const double w = (comp.t_end - comp.t_begin) / kArclengthIntervals;
    for (int k = 0; k < kArclengthIntervals; ++k) {
      const double a = comp.t_begin + k * w;
      double piece = 0.0;
      for (std::size_t q = 0; q < gauss.nodes.size(); ++q)
        piece += gauss.weights[q] * comp.derivative(a + gauss.nodes[q] * w).norm();
      table[k + 1] = table[k] + piece * w;
    }
    tables_.push_back(std::move(table));
  }
}

Vec2 ParametricCurve::normal(int c, double t) const {
  return rotate90(derivative(c, t)).normalized();
}

double ParametricCurve::total_length() const {
  double sum = 0.0;
  for (std::size_t c = 0; c < components_.size(); ++c) sum += length(static_cast<int>(c));
  return sum;
}

double ParametricCurve::sub_width(int c) const {
  return (components_[c].t_end - components_[c].t_begin) / kArclengthIntervals;
}

double ParametricCurve::arclength_at(int c, double t) const {
  const auto& comp = components_[c];
  t = std::clamp(t, comp.t_begin, comp.t_end);
  const double w = sub_width(c);
  const int k = std::min(static_cast<int>((t - comp.t_begin) / w), kArclengthIntervals - 1);
  const double a = comp.t_begin + k * w;
  const double span = t - a;
  double piece = 0.0;
  if (span > 0.0) {
    const GaussRule& gauss = gauss_legendre(16);
    for (std::size_t q = 0; q < gauss.nodes.size(); ++q)
      piece += gauss.weights[q] * comp.derivative(a + gauss.nodes[q] * span).norm();
    piece *= span;
  }
  return tables_[c][k] + piece;
}

double ParametricCurve::parameter_at_arclength(int c, double s) const {
  const auto& comp = components_[c];
  const auto& table = tables_[c];
  if (s <= 0.0) return comp.t_begin;
  if (s >= table.back()) return comp.t_end;
  const int k = static_cast<int>(std::upper_bound(table.begin(), table.end(), s) - table.begin()) - 1;
  const double w = sub_width(c);
  double lo = comp.t_begin + k * w, hi = lo + w;
  auto f = [&](double t) { return arclength_at(c, t) - s; };
  return bracketed_root(f, lo, hi, f(lo), f(hi));
}

ParametricCurve make_segment_curve() {
  CurveComponent comp;
  comp.position = [](double t) { return Vec2(0.25 + 0.5 * t, 0.5); };
  comp.derivative = [](double) { return Vec2(0.5, 0.0); };
  return ParametricCurve("segment", {comp});
}

ParametricCurve make_circle_curve(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
  CurveComponent comp;
  comp.position = [=](double t) {
    return Vec2(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t));
  };
  comp.derivative = [=](double t) { return Vec2(-radius * std::sin(t), radius * std::cos(t)); };
  comp.t_end = 2.0 * std::numbers::pi;
  comp.closed = true;
  return ParametricCurve("circle", {comp});
}

Vec2 spiral_position(const SpiralParams& p, double t) {
  const double r = p.rate * t, a = p.angle_scale * t;
  return Vec2(0.5 + r * std::sin(a), 0.5 + r * std::cos(a));
}

ParametricCurve make_spiral_curve(const SpiralParams& p) {
  if (!(p.rate > 0.0) || !(p.t_end > 0.0) || !(p.angle_scale > 0.0))
    throw InvalidArgument("spiral parameters must be positive");
  CurveComponent comp;
  const double r = p.rate, k = p.angle_scale;
  comp.position = [=](double t) { return spiral_position(p, t); };
  comp.derivative = [=](double t) {
    return Vec2(r * (std::sin(k * t) + k * t * std::cos(k * t)),
                r * (std::cos(k * t) - k * t * std::sin(k * t)));
  };
  comp.t_end = p.t_end;
  return ParametricCurve("spiral", {comp});
}

ParametricCurve make_spokes_curve(const SpokesParams& p) {
  if (p.count < 1 || !(p.inner_radius > 0.0) || !(p.outer_radius > p.inner_radius))
    throw InvalidArgument("spokes need count >= 1 and 0 < inner < outer radius");
  std::vector<CurveComponent> comps;
  for (int i = 0; i < p.count; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / p.count;
    const Vec2 dir(std::cos(angle), std::sin(angle));
    CurveComponent comp;
    comp.position = [=](double t) -> Vec2 { return Vec2(0.5, 0.5) + (p.inner_radius + t) * dir; };
    comp.derivative = [=](double) { return dir; };
    comp.t_end = p.outer_radius - p.inner_radius;
    comps.push_back(comp);
  }
  return ParametricCurve("spokes", std::move(comps));
}

ParametricCurve make_builtin_curve(std::string_view kind, std::span<const double> params) {
  auto param = [&](std::size_t i, double fallback) {
    return i < params.size() ? params[i] : fallback;
  };
  if (kind == "segment") return make_segment_curve();
  if (kind == "circle") return make_circle_curve(param(0, 0.25));
  if (kind == "spiral") {
    SpiralParams sp;
    return make_spiral_curve({param(0, sp.rate), param(1, sp.t_end), param(2, sp.angle_scale)});
  }
  if (kind == "spokes") {
    SpokesParams sp;
    return make_spokes_curve({static_cast<int>(param(0, sp.count)), param(1, sp.inner_radius),
                              param(2, sp.outer_radius)});
  }
  throw InvalidArgument("unknown curve kind '" + std::string(kind) + "'");
}

double PolylineComponent::length() const {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) sum += (vertices[k + 1] - vertices[k]).norm();
  return sum;
}

double PolygonalCurve::total_length() const {
  double sum = 0.0;
  for (const auto& comp : components) sum += comp.length();
  return sum;
}

PolygonalCurve polygonal_interpolation(const ParametricCurve& curve, double sigma_target) {
  if (!(sigma_target > 0.0)) throw InvalidArgument("sigma must be positive");
  PolygonalCurve poly;
  for (int c = 0; c < static_cast<int>(curve.num_components()); ++c) {
    const double length = curve.length(c);
    const int m = std::max(1, static_cast<int>(std::ceil(length / sigma_target - 1e-12)));
    PolylineComponent comp;
    comp.closed = curve.component(c).closed;
    for (int k = 0; k <= m; ++k) {
      double t;
      if (k == 0)
        t = curve.component(c).t_begin;
      else if (k == m)
        t = curve.component(c).t_end;
      else
        t = curve.parameter_at_arclength(c, length * k / m);
      comp.params.push_back(t);
      comp.vertices.push_back(curve.position(c, t));
    }
    if (comp.closed) comp.vertices.back() = comp.vertices.front();
    for (std::size_t k = 0; k + 1 < comp.vertices.size(); ++k)
      poly.sigma = std::max(poly.sigma, (comp.vertices[k + 1] - comp.vertices[k]).norm());
    poly.components.push_back(std::move(comp));
  }
  return poly;
}

PolygonalCurve polygon_from_points(std::vector<std::vector<Vec2>> components) {
  PolygonalCurve poly;
  poly.has_smooth_curve = false;
  for (auto& pts : components) {
    if (pts.size() < 2) throw InvalidArgument("polyline component needs at least 2 vertices");
    PolylineComponent comp;
    comp.closed = (pts.front() - pts.back()).norm() == 0.0;
    comp.params.push_back(0.0);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double chord = (pts[k + 1] - pts[k]).norm();
      if (!(chord > 0.0)) throw InvalidArgument("polyline has repeated consecutive vertices");
      comp.params.push_back(comp.params.back() + chord);
      poly.sigma = std::max(poly.sigma, chord);
    }
    comp.vertices = std::move(pts);
    poly.components.push_back(std::move(comp));
  }
  if (poly.components.empty()) throw InvalidArgument("polyline has no vertices");
  return poly;
}

PolygonalCurve read_polyline_csv(std::string_view text) {
  std::vector<std::vector<Vec2>> comps(1);
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!comps.back().empty()) comps.emplace_back();
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    double x, y;
    if (!(in >> x >> y)) {
      if (line_no == 1 && comps.back().empty()) continue; // header row
      throw ParseError("expected two numeric columns", line_no);
    }
    comps.back().emplace_back(x, y);
  }
  if (comps.back().empty()) comps.pop_back();
  return polygon_from_points(std::move(comps));
}

CurveProjection closest_point(const ParametricCurve& curve, const Vec2& x) {
  struct Candidate {
    int component;
    double t;
    double dist;
    Vec2 foot;
  };
  std::vector<Candidate> candidates;
  constexpr int kSamples = 2048;
  for (int c = 0; c < static_cast<int>(curve.num_components()); ++c) {
    const auto& comp = curve.component(c);
    auto slope = [&](double t) { return (comp.position(t) - x).dot(comp.derivative(t)); };
    auto add = [&](double t) {
      const Vec2 foot = comp.position(t);
      candidates.push_back({c, t, (foot - x).norm(), foot});
    };
    std::vector<double> ts(kSamples + 1), fs(kSamples + 1);
    for (int k = 0; k <= kSamples; ++k) {
      ts[k] = comp.t_begin + (comp.t_end - comp.t_begin) * k / kSamples;
      fs[k] = slope(ts[k]);
    }
    if (!comp.closed) {
      if (fs.front() > 0.0) add(ts.front());
      if (fs.back() < 0.0) add(ts.back());
    }
    for (int k = 0; k < kSamples; ++k)
      if (fs[k] <= 0.0 && fs[k + 1] > 0.0) add(bracketed_root(slope, ts[k], ts[k + 1], fs[k], fs[k + 1]));
  }
  if (candidates.empty()) throw AmbiguityError("no local minimum of the distance found");
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  const Candidate& best = candidates.front();
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const Candidate& other = candidates[k];
    if ((other.foot - best.foot).norm() < 1e-9) continue; // same point seen twice
    if (other.dist < 2.0 * best.dist)
      throw AmbiguityError("closest point on the curve is not unique enough");
    break;
  }
  CurveProjection proj;
  proj.component = best.component;
  proj.t = best.t;
  proj.foot = best.foot;
  proj.distance = (x - best.foot).dot(curve.normal(best.component, best.t));
  return proj;
}

LiftPoint lift_point(const ParametricCurve& curve, const PolygonalCurve& polygon, int component,
                     double t) {
  const auto& comp = polygon.components.at(component);
  const Vec2 c = curve.position(component, t);
  const Vec2 mu = curve.normal(component, t);
  const int nseg = static_cast<int>(comp.num_segments());
  int k = static_cast<int>(std::upper_bound(comp.params.begin(), comp.params.end(), t) -
                           comp.params.begin()) - 1;
  k = std::clamp(k, 0, nseg - 1);

  LiftPoint best;
  bool found = false;
  for (int d : {0, -1, 1, -2, 2}) {
    int s = k + d;
    if (comp.closed)
      s = (s % nseg + nseg) % nseg;
    else if (s < 0 || s >= nseg)
      continue;
    const Vec2 a = comp.vertices[s], b = comp.vertices[s + 1];
    const Vec2 e = b - a;
    // a + lambda e = c + offset mu
    const double det = cross(mu, e);
    if (std::abs(det) < 1e-14 * e.norm()) continue;
    const Vec2 r = c - a;
    const double lambda = cross(mu, r) / det;
    const double offset = cross(e, r) / det;
    if (lambda < -1e-12 || lambda > 1.0 + 1e-12) continue;
    if (!found || std::abs(offset) < std::abs(best.offset)) {
      const double l = std::clamp(lambda, 0.0, 1.0);
      best = {s, l, a + l * e, offset};
      found = true;
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "normal line at t=" << t << " of component " << component
        << " misses the polygon (sigma=" << polygon.sigma << ")";
    throw CoveringError(msg.str());
  }
  return best;
}

std::vector<double> lift_values(const ParametricCurve& curve, const PolygonalCurve& polygon,
                                const std::function<double(const Vec2&)>& f,
                                std::span<const CurveParam> params) {
  std::vector<double> out;
  out.reserve(params.size());
  for (const auto& cp : params) out.push_back(f(lift_point(curve, polygon, cp.component, cp.t).point));
  return out;
}

double sup_distance(const ParametricCurve& curve, const PolygonalCurve& polygon,
                    int samples_per_segment) {
  if (samples_per_segment < 1) throw InvalidArgument("samples_per_segment must be positive");
  double sup = 0.0;
  for (int c = 0; c < static_cast<int>(polygon.components.size()); ++c) {
    const auto& params = polygon.components[c].params;
    for (std::size_t k = 0; k + 1 < params.size(); ++k)
      for (int j = 0; j <= samples_per_segment; ++j) {
        const double t = params[k] + (params[k + 1] - params[k]) * j / samples_per_segment;
        sup = std::max(sup, std::abs(lift_point(curve, polygon, c, t).offset));
      }
  }
  return sup;
}

double measure_quotient_dev(const ParametricCurve& curve, const PolygonalCurve& polygon) {
  double dev = 0.0;
  for (int c = 0; c < static_cast<int>(polygon.components.size()); ++c) {
    const auto& comp = polygon.components[c];
    for (std::size_t k = 0; k < comp.num_segments(); ++k) {
      // Covering check at the segment midpoint of the curve piece.
      lift_point(curve, polygon, c, 0.5 * (comp.params[k] + comp.params[k + 1]));
      const double chord = (comp.vertices[k + 1] - comp.vertices[k]).norm();
      const double arc = curve.arclength_at(c, comp.params[k + 1]) - curve.arclength_at(c, comp.params[k]);
      dev = std::max(dev, std::abs(1.0 - chord / arc));
    }
  }
  return dev;
}

SurfaceData constant_data(double v) {
  std::ostringstream name;
  name << "const:" << v;
  return {name.str(), [v](const CurvePoint&) { return v; }, {}};
}

SurfaceData sin3pix_data() {
  return {"sin3pix", [](const CurvePoint& p) { return std::sin(3.0 * std::numbers::pi * p.x.x()); }, {}};
}

SurfaceData jump_literal_data() {
  return {"jump_literal", [](const CurvePoint& p) { return p.x.x() < 0.0 ? 1.0 : -1.0; }, {}};
}

SurfaceData jump_midflip_data() {
  return {"jump_midflip", [](const CurvePoint& p) { return p.fraction < 0.5 ? 1.0 : -1.0; }, {0.5}};
}

std::vector<std::vector<double>> interpolate_surface_data(const ParametricCurve* curve,
                                                          const PolygonalCurve& polygon,
                                                          const SurfaceData& g) {
  std::vector<std::vector<double>> nodal;
  for (int c = 0; c < static_cast<int>(polygon.components.size()); ++c) {
    const auto& comp = polygon.components[c];
    const double total = curve ? curve->length(c) : comp.params.back();
    std::vector<double> values;
    for (std::size_t k = 0; k < comp.vertices.size(); ++k) {
      const double s = curve ? curve->arclength_at(c, comp.params[k]) : comp.params[k];
      values.push_back(g.value({c, s / total, comp.vertices[k]}));
    }
    nodal.push_back(std::move(values));
  }
  return nodal;
}

double data_interp_error(const ParametricCurve& curve, const PolygonalCurve& polygon,
                         const SurfaceData& g) {
  const auto nodal = interpolate_surface_data(&curve, polygon, g);
  const GaussRule& gauss = gauss_legendre(16);
  double sum = 0.0;
  for (int c = 0; c < static_cast<int>(polygon.components.size()); ++c) {
    const auto& comp = polygon.components[c];
    const double total = curve.length(c);
    for (std::size_t k = 0; k < comp.num_segments(); ++k) {
      const double a = comp.params[k], b = comp.params[k + 1];
      for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
        const double t = a + gauss.nodes[q] * (b - a);
        const LiftPoint lp = lift_point(curve, polygon, c, t);
        const double gi = (1.0 - lp.lambda) * nodal[c][lp.segment] + lp.lambda * nodal[c][lp.segment + 1];
        const Vec2 x = curve.position(c, t);
        const double gx = g.value({c, curve.arclength_at(c, t) / total, x});
        sum += gauss.weights[q] * (b - a) * curve.derivative(c, t).norm() * (gx - gi) * (gx - gi);
      }
    }
  }
  return std::sqrt(sum);
}

GeometryReport geometry_report(const ParametricCurve& curve, const PolygonalCurve& polygon,
                               const SurfaceData& g, int samples_per_segment) {
  return {sup_distance(curve, polygon, samples_per_segment), measure_quotient_dev(curve, polygon),
          data_interp_error(curve, polygon, g)};
}

} // namespace hsoc

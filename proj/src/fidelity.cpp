#include "hsoc/fidelity.hpp"

#include "hsoc/errors.hpp"
#include "hsoc/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

namespace hsoc {
namespace {

constexpr double kDedupTol = 1e-14;
constexpr double kMergeTol = 1e-12;

using Triplets = std::vector<Eigen::Triplet<double>>;

// Accumulates M, G and g_const from weighted evaluation points.
struct Accumulator {
  const Mesh2D& mesh;
  Triplets trip;
  Eigen::VectorXd G;
  double g_const = 0.0;

  explicit Accumulator(const Mesh2D& m)
      : mesh(m), G(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_vertices()))) {}

  void add(int triangle, const std::array<double, 3>& b, double weight, double g) {
    const auto& tri = mesh.triangles()[triangle];
    for (int i = 0; i < 3; ++i) {
      G[tri[i]] += weight * g * b[i];
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], weight * b[i] * b[j]);
    }
    g_const += weight * g * g;
  }

  void finish(FidelityTerm& term) {
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    term.M = SparseMatrix(n, n);
    term.M.setFromTriplets(trip.begin(), trip.end());
    term.G = std::move(G);
    term.g_const = g_const;
  }
};

std::array<double, 3> midpoint(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

// Sorted parameters with near-duplicates removed. `scale` converts a
// parameter difference into a length.
std::vector<double> dedup_sorted(std::vector<double> v, double scale) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || (x - out.back()) * scale > kDedupTol) out.push_back(x);
  return out;
}

PointLocation locate_or_throw(const Mesh2D& mesh, const Vec2& x, int hint) {
  const auto loc = mesh.locate(x, hint);
  if (!loc) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "curve point (%.9g, %.9g) lies outside the mesh", x.x(), x.y());
    throw LocateError(buf);
  }
  return *loc;
}

} // namespace

SurfaceAssembly assemble_polygon_terms(const Mesh2D& mesh, const PolygonalCurve& polygon,
                                       const std::vector<std::vector<double>>& nodal_g,
                                       const MeasureWeight& weight) {
  if (nodal_g.size() != polygon.components.size())
    throw InvalidArgument("data has the wrong number of components");
  SurfaceAssembly out;
  out.method = FidelityMethod::PolygonalCurve;
  Accumulator acc(mesh);
  int hint = -1;
  for (int c = 0; c < static_cast<int>(polygon.components.size()); ++c) {
    const auto& comp = polygon.components[c];
    if (nodal_g[c].size() != comp.vertices.size())
      throw InvalidArgument("data has the wrong number of vertices");
    for (std::size_t k = 0; k < comp.num_segments(); ++k) {
      const Vec2 p0 = comp.vertices[k], p1 = comp.vertices[k + 1];
      const double g0 = nodal_g[c][k], g1 = nodal_g[c][k + 1];
      const double seg_len = (p1 - p0).norm();
      auto point_at = [&](double s) { return s == 0.0 ? p0 : s == 1.0 ? p1 : Vec2(p0 + s * (p1 - p0)); };

      // Crossings of the segment with triangle edges.
      std::vector<double> breaks{0.0, 1.0};
      const Vec2 pad(1e-12, 1e-12);
      for (int t : mesh.triangles_in_box(p0.cwiseMin(p1) - pad, p0.cwiseMax(p1) + pad)) {
        const auto b0 = mesh.barycentric(t, p0), b1 = mesh.barycentric(t, p1);
        for (int i = 0; i < 3; ++i) {
          const double d = b0[i] - b1[i];
          if (d == 0.0) continue;
          const double s = b0[i] / d;
          if (s <= 0.0 || s >= 1.0) continue;
          bool on_edge = true;
          for (int j = 0; j < 3; ++j) {
            const double bj = b0[j] + s * (b1[j] - b0[j]);
            if (j != i && (bj < -kBaryTol || bj > 1.0 + kBaryTol)) on_edge = false;
          }
          if (on_edge) breaks.push_back(s);
        }
      }
      breaks = dedup_sorted(std::move(breaks), seg_len);
      breaks.front() = 0.0;
      breaks.back() = 1.0;

      for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double sa = breaks[j], sb = breaks[j + 1];
        const double len = (sb - sa) * seg_len;
        if (len < kDedupTol) continue;
        const Vec2 xa = point_at(sa), xb = point_at(sb);
        const PointLocation loc = locate_or_throw(mesh, point_at(0.5 * (sa + sb)), hint);
        hint = loc.triangle;
        SubSegment sub;
        sub.triangle = loc.triangle;
        sub.component = c;
        sub.start = xa;
        sub.end = xb;
        sub.bary_start = mesh.barycentric(loc.triangle, xa);
        sub.bary_end = mesh.barycentric(loc.triangle, xb);
        sub.length = len;
        sub.t_start = comp.params[k] + sa * (comp.params[k + 1] - comp.params[k]);
        sub.t_end = comp.params[k] + sb * (comp.params[k + 1] - comp.params[k]);
        sub.g_start = g0 + sa * (g1 - g0);
        sub.g_end = g0 + sb * (g1 - g0);

        const double gm = 0.5 * (sub.g_start + sub.g_end);
        const auto bm = midpoint(sub.bary_start, sub.bary_end);
        double w0 = len / 6.0, wm = 4.0 * len / 6.0, w1 = len / 6.0;
        if (weight) {
          w0 *= weight(xa);
          wm *= weight(point_at(0.5 * (sa + sb)));
          w1 *= weight(xb);
        }
        acc.add(sub.triangle, sub.bary_start, w0, sub.g_start);
        acc.add(sub.triangle, bm, wm, gm);
        acc.add(sub.triangle, sub.bary_end, w1, sub.g_end);
        out.sub_segments.push_back(sub);
      }
    }
  }
  acc.finish(out);
  return out;
}

SurfaceAssembly assemble_curve_terms(const Mesh2D& mesh, const ParametricCurve& curve,
                                     const SurfaceData& g, int gauss_order,
                                     const MeasureWeight& weight) {
  const GaussRule& gauss = gauss_legendre(gauss_order);
  SurfaceAssembly out;
  out.method = FidelityMethod::ExactCurve;
  Accumulator acc(mesh);
  const double h_min = mesh_quality(mesh).h_min;
  int hint = -1;

  for (int c = 0; c < static_cast<int>(curve.num_components()); ++c) {
    const auto& comp = curve.component(c);
    const double span = comp.t_end - comp.t_begin;
    double max_speed = 0.0;
    for (int k = 0; k <= 1024; ++k)
      max_speed = std::max(max_speed, comp.derivative(comp.t_begin + span * k / 1024).norm());
    // Sampling fine enough that an arc crosses each edge line at most once.
    const int samples = std::max(64, static_cast<int>(std::ceil(max_speed * span / (0.25 * h_min))));

    std::vector<double> breaks{comp.t_begin, comp.t_end};
    for (double frac : g.jump_fractions)
      breaks.push_back(curve.parameter_at_arclength(c, frac * curve.length(c)));

    std::vector<double> ts(samples + 1);
    std::vector<Vec2> xs(samples + 1);
    for (int j = 0; j <= samples; ++j) {
      ts[j] = j == samples ? comp.t_end : comp.t_begin + span * j / samples;
      xs[j] = comp.position(ts[j]);
    }
    for (int j = 0; j < samples; ++j) {
      const double chord = (xs[j + 1] - xs[j]).norm();
      const Vec2 pad = Vec2::Constant(0.5 * chord + 1e-12);
      std::set<std::pair<int, int>> edges;
      for (int t : mesh.triangles_in_box(xs[j].cwiseMin(xs[j + 1]) - pad, xs[j].cwiseMax(xs[j + 1]) + pad)) {
        const auto& tri = mesh.triangles()[t];
        for (int k = 0; k < 3; ++k)
          edges.emplace(std::min(tri[k], tri[(k + 1) % 3]), std::max(tri[k], tri[(k + 1) % 3]));
      }
      for (const auto& [va, vb] : edges) {
        const Vec2 p = mesh.vertices()[va], q = mesh.vertices()[vb];
        const Vec2 e = q - p;
        auto side = [&](double t) { return cross(e, comp.position(t) - p); };
        const double fa = cross(e, xs[j] - p), fb = cross(e, xs[j + 1] - p);
        double root;
        if (fa == 0.0)
          root = ts[j];
        else if (fb == 0.0 || fa * fb > 0.0)
          continue;
        else {
          std::uintmax_t iters = 200;
          const auto [lo, hi] = boost::math::tools::toms748_solve(
              side, ts[j], ts[j + 1], fa, fb, boost::math::tools::eps_tolerance<double>(53), iters);
          root = 0.5 * (lo + hi);
        }
        const double along = (comp.position(root) - p).dot(e) / e.squaredNorm();
        if (along >= -kBaryTol && along <= 1.0 + kBaryTol) breaks.push_back(root);
      }
    }
    breaks = dedup_sorted(std::move(breaks), max_speed);

    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
      const double ta = breaks[j], tb = breaks[j + 1];
      const double arc = curve.arclength_at(c, tb) - curve.arclength_at(c, ta);
      if (arc < kDedupTol) continue;
      const PointLocation loc = locate_or_throw(mesh, comp.position(0.5 * (ta + tb)), hint);
      hint = loc.triangle;
      SubSegment sub;
      sub.triangle = loc.triangle;
      sub.component = c;
      sub.start = comp.position(ta);
      sub.end = comp.position(tb);
      sub.bary_start = mesh.barycentric(loc.triangle, sub.start);
      sub.bary_end = mesh.barycentric(loc.triangle, sub.end);
      sub.length = arc;
      sub.t_start = ta;
      sub.t_end = tb;
      for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
        const double t = ta + gauss.nodes[q] * (tb - ta);
        const Vec2 x = comp.position(t);
        double w = gauss.weights[q] * (tb - ta) * comp.derivative(t).norm();
        if (weight) w *= weight(x);
        const double gx = g.value({c, curve.arclength_at(c, t) / curve.length(c), x});
        acc.add(loc.triangle, mesh.barycentric(loc.triangle, x), w, gx);
      }
      out.sub_segments.push_back(sub);
    }
  }
  acc.finish(out);
  return out;
}

SurfaceAssembly assemble_surface_terms(const Mesh2D& mesh, const ParametricCurve& curve,
                                       const SurfaceData& g, FidelityMethod method, double sigma,
                                       int gauss_order) {
  if (method == FidelityMethod::ExactCurve) return assemble_curve_terms(mesh, curve, g, gauss_order);
  const PolygonalCurve polygon = polygonal_interpolation(curve, sigma);
  return assemble_polygon_terms(mesh, polygon, interpolate_surface_data(&curve, polygon, g));
}

double PointControlData::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

PointControlData reduce_to_point_control(const SurfaceAssembly& assembly) {
  if (assembly.method != FidelityMethod::PolygonalCurve)
    throw InvalidArgument("point reduction needs a polygonal (method 2) assembly");
  PointControlData out;
  // Quantized position -> merged node; neighbouring cells are checked so
  // nodes within kMergeTol straddling a cell boundary still merge.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> cells;
  auto cell_of = [](const Vec2& x) {
    return std::pair{static_cast<std::int64_t>(std::floor(x.x() / (4 * kMergeTol))),
                     static_cast<std::int64_t>(std::floor(x.y() / (4 * kMergeTol)))};
  };
  auto emit = [&](const Vec2& x, double w, double g) {
    const auto [cx, cy] = cell_of(x);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (int idx : it->second)
          if ((out.points[idx] - x).cwiseAbs().maxCoeff() <= kMergeTol) {
            out.weights[idx] += w;
            return;
          }
      }
    cells[{cx, cy}].push_back(static_cast<int>(out.points.size()));
    out.points.push_back(x);
    out.weights.push_back(w);
    out.values.push_back(g);
  };
  for (const auto& sub : assembly.sub_segments) {
    const double L = sub.length;
    emit(sub.start, L / 6.0, sub.g_start);
    emit(0.5 * (sub.start + sub.end), 4.0 * L / 6.0, 0.5 * (sub.g_start + sub.g_end));
    emit(sub.end, L / 6.0, sub.g_end);
  }
  return out;
}

PointControlData evenly_spaced_points(const ParametricCurve& curve, int count, double weight,
                                      const SurfaceData& g, bool include_ends) {
  if (count < 2) throw InvalidArgument("need at least two points");
  PointControlData out;
  const double total = curve.total_length();
  for (int k = 0; k < count; ++k) {
    double s = include_ends ? total * k / (count - 1) : total * (k + 0.5) / count;
    int c = 0;
    while (c + 1 < static_cast<int>(curve.num_components()) && s > curve.length(c)) {
      s -= curve.length(c);
      ++c;
    }
    s = std::min(s, curve.length(c));
    const Vec2 x = curve.position(c, curve.parameter_at_arclength(c, s));
    out.points.push_back(x);
    out.weights.push_back(weight);
    out.values.push_back(g.value({c, s / curve.length(c), x}));
  }
  return out;
}

FidelityTerm point_fidelity_term(const Mesh2D& mesh, const PointControlData& points) {
  FidelityTerm term;
  Accumulator acc(mesh);
  int hint = -1;
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    const PointLocation loc = locate_or_throw(mesh, points.points[i], hint);
    hint = loc.triangle;
    acc.add(loc.triangle, loc.bary, points.weights[i], points.values[i]);
  }
  acc.finish(term);
  return term;
}

double fidelity_value(const FidelityTerm& term, const FeFunction& y) {
  const Eigen::VectorXd& c = y.coefficients();
  if (c.size() != term.G.size()) throw InvalidArgument("function and fidelity live on different meshes");
  return 0.5 * (c.dot(term.M * c) - 2.0 * c.dot(term.G) + term.g_const);
}

double point_fidelity_value(const PointControlData& points, const FeFunction& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    const double r = y.evaluate(points.points[i]) - points.values[i];
    sum += points.weights[i] * r * r;
  }
  return 0.5 * sum;
}

void write_sub_segments_csv(std::ostream& out, const SurfaceAssembly& assembly) {
  char buf[256];
  out << "triangle,component,x0,y0,x1,y1,length\n";
  for (const auto& s : assembly.sub_segments) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.triangle, s.component,
                  s.start.x(), s.start.y(), s.end.x(), s.end.y(), s.length);
    out << buf;
  }
}

void write_point_control_csv(std::ostream& out, const PointControlData& points) {
  char buf[160];
  out << "x,y,weight,g\n";
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", points.points[i].x(), points.points[i].y(),
                  points.weights[i], points.values[i]);
    out << buf;
  }
}

} // namespace hsoc

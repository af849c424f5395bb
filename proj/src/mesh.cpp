#include "hsoc/mesh.hpp"

#include "hsoc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <unordered_map>

namespace hsoc {
namespace {

bool on_square_boundary(const Vec2& p) {
  return std::abs(p.x()) <= kBoundaryTol || std::abs(p.x() - 1.0) <= kBoundaryTol ||
         std::abs(p.y()) <= kBoundaryTol || std::abs(p.y() - 1.0) <= kBoundaryTol;
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

} // namespace

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
               std::optional<std::vector<bool>> boundary_flags)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  if (nv < 3 || triangles_.empty())
    throw ValidationError("mesh needs at least one triangle");

  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= nv)
        throw ValidationError("triangle " + std::to_string(t) +
                              " references missing vertex " + std::to_string(v));
    const double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(std::abs(a) > 0.0) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw ValidationError("triangle " + std::to_string(t) + " has zero area");
    if (a < 0.0) std::swap(tri[1], tri[2]);
  }

  if (boundary_flags) {
    if (boundary_flags->size() != vertices_.size())
      throw ValidationError("boundary flag count does not match vertex count");
    boundary_ = std::move(*boundary_flags);
    for (int v = 0; v < nv; ++v)
      if (boundary_[v] != on_square_boundary(vertices_[v]))
        throw ValidationError("boundary marker of vertex " + std::to_string(v) +
                              " disagrees with its position");
  } else {
    boundary_.resize(nv);
    for (int v = 0; v < nv; ++v) boundary_[v] = on_square_boundary(vertices_[v]);
  }

  // Edge adjacency; the edge opposite local vertex k is (k+1, k+2).
  neighbors_.assign(triangles_.size(), {-1, -1, -1});
  auto key = [](int a, int b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, std::pair<int, int>> open_edges;
  open_edges.reserve(2 * triangles_.size());
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      auto twin = open_edges.find(key(b, a));
      if (twin != open_edges.end()) {
        const auto [other, ok] = twin->second;
        if (neighbors_[other][ok] != -1)
          throw ValidationError("edge shared by more than two triangles");
        neighbors_[t][k] = other;
        neighbors_[other][ok] = t;
        open_edges.erase(twin);
      } else {
        if (!open_edges.emplace(key(a, b), std::pair{t, k}).second)
          throw ValidationError("overlapping triangles share an edge with equal orientation");
      }
    }
  }
  vertex_triangles_.assign(nv, {});
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t)
    for (int v : triangles_[t]) vertex_triangles_[v].push_back(t);

  dof_of_vertex_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!boundary_[v]) {
      dof_of_vertex_[v] = static_cast<int>(interior_vertices_.size());
      interior_vertices_.push_back(v);
    }
  }

  for (const auto& tri : triangles_)
    for (int k = 0; k < 3; ++k)
      h_max_ = std::max(h_max_, (vertices_[tri[k]] - vertices_[tri[(k + 1) % 3]]).norm());

  build_bucket_grid();

  // An unmatched edge is part of the domain boundary unless a vertex of
  // another triangle sits inside it, which would be a hanging node.
  for (const auto& [edge, owner] : open_edges) {
    const Vec2 pa = vertices_[static_cast<int>(edge >> 32)];
    const Vec2 pb = vertices_[static_cast<int>(edge & 0xffffffffu)];
    const Vec2 d = pb - pa;
    const double len2 = d.squaredNorm();
    for (int t : triangles_in_box(pa.cwiseMin(pb), pa.cwiseMax(pb))) {
      for (int v : triangles_[t]) {
        const Vec2 w = vertices_[v] - pa;
        const double along = w.dot(d);
        if (std::abs(cross(d, w)) <= 1e-12 * len2 && along > 1e-12 * len2 &&
            along < (1.0 - 1e-12) * len2)
          throw ValidationError("hanging node " + std::to_string(v) + " on an edge of triangle " +
                                std::to_string(owner.first));
      }
    }
  }
}

void Mesh2D::build_bucket_grid() {
  Vec2 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  grid_dim_ = std::clamp(static_cast<int>(std::sqrt(triangles_.size() / 2.0)), 1, 1024);
  grid_lo_ = lo;
  grid_cell_ = std::max(hi.x() - lo.x(), hi.y() - lo.y()) / grid_dim_;
  buckets_.assign(static_cast<std::size_t>(grid_dim_) * grid_dim_, {});
  auto cell = [&](double v, double origin) {
    return std::clamp(static_cast<int>(std::floor((v - origin) / grid_cell_)), 0,
                      grid_dim_ - 1);
  };
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    const auto c = corners(t);
    const Vec2 tlo = c[0].cwiseMin(c[1]).cwiseMin(c[2]);
    const Vec2 thi = c[0].cwiseMax(c[1]).cwiseMax(c[2]);
    for (int j = cell(tlo.y(), lo.y()); j <= cell(thi.y(), lo.y()); ++j)
      for (int i = cell(tlo.x(), lo.x()); i <= cell(thi.x(), lo.x()); ++i)
        buckets_[static_cast<std::size_t>(j) * grid_dim_ + i].push_back(t);
  }
}

std::vector<int> Mesh2D::triangles_in_box(const Vec2& lo, const Vec2& hi) const {
  auto cell = [&](double v, double origin) {
    return std::clamp(static_cast<int>(std::floor((v - origin) / grid_cell_)), 0,
                      grid_dim_ - 1);
  };
  std::vector<int> out;
  for (int j = cell(lo.y(), grid_lo_.y()); j <= cell(hi.y(), grid_lo_.y()); ++j)
    for (int i = cell(lo.x(), grid_lo_.x()); i <= cell(hi.x(), grid_lo_.x()); ++i)
      for (int t : buckets_[static_cast<std::size_t>(j) * grid_dim_ + i]) {
        const auto c = corners(t);
        const Vec2 tlo = c[0].cwiseMin(c[1]).cwiseMin(c[2]);
        const Vec2 thi = c[0].cwiseMax(c[1]).cwiseMax(c[2]);
        if (tlo.x() <= hi.x() && tlo.y() <= hi.y() && thi.x() >= lo.x() && thi.y() >= lo.y())
          out.push_back(t);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Mesh2D::area(int t) const {
  const auto c = corners(t);
  return signed_area(c[0], c[1], c[2]);
}

double Mesh2D::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) sum += area(t);
  return sum;
}

std::array<Vec2, 3> Mesh2D::corners(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

std::array<double, 3> Mesh2D::barycentric(int t, const Vec2& x) const {
  const auto c = corners(t);
  const double twice_area = cross(c[1] - c[0], c[2] - c[0]);
  const double l1 = cross(c[2] - c[1], x - c[1]) / twice_area;
  const double l2 = cross(c[0] - c[2], x - c[2]) / twice_area;
  const double l3 = cross(c[1] - c[0], x - c[0]) / twice_area;
  // Renormalize so the coordinates sum to one exactly up to roundoff.
  const double s = l1 + l2 + l3;
  return {l1 / s, l2 / s, l3 / s};
}

Vec2 Mesh2D::point_from_bary(int t, const std::array<double, 3>& b) const {
  const auto c = corners(t);
  return b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
}

bool Mesh2D::contains(int t, const Vec2& x, std::array<double, 3>& bary) const {
  bary = barycentric(t, x);
  return bary[0] >= -kBaryTol && bary[1] >= -kBaryTol && bary[2] >= -kBaryTol;
}

std::optional<PointLocation> Mesh2D::locate_brute_force(const Vec2& x) const {
  std::array<double, 3> bary;
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t)
    if (contains(t, x, bary)) return PointLocation{t, bary};
  return std::nullopt;
}

std::optional<PointLocation> Mesh2D::walk(const Vec2& x, int start) const {
  int t = start;
  int previous = -1;
  std::array<double, 3> bary;
  for (std::size_t step = 0; step <= triangles_.size(); ++step) {
    if (contains(t, x, bary)) return PointLocation{t, bary};
    // Leave through the most violated edge that does not lead back.
    int best = -1;
    double most_negative = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int nb = neighbors_[t][k];
      if (bary[k] < most_negative && nb != -1 && nb != previous) {
        most_negative = bary[k];
        best = k;
      }
    }
    if (best == -1) return std::nullopt;
    previous = t;
    t = neighbors_[t][best];
  }
  return std::nullopt;
}

PointLocation Mesh2D::canonicalize(const Vec2& x, PointLocation found) const {
  const double min_bary = std::min({found.bary[0], found.bary[1], found.bary[2]});
  if (min_bary > 1e-6) return found;
  std::array<double, 3> bary;
  for (int v : triangles_[found.triangle])
    for (int t : vertex_triangles_[v])
      if (t < found.triangle && contains(t, x, bary)) found = PointLocation{t, bary};
  return found;
}

std::optional<PointLocation> Mesh2D::locate(const Vec2& x, int hint) const {
  if (triangles_.size() < 5000) return locate_brute_force(x);

  int start = hint;
  if (start < 0 || start >= static_cast<int>(triangles_.size())) {
    const auto near = triangles_in_box(x, x);
    start = near.empty() ? 0 : near.front();
  }
  if (auto hit = walk(x, start)) return canonicalize(x, *hit);

  // Walk got stuck (point outside, or a non-convex imported mesh).
  std::array<double, 3> bary;
  for (int t : triangles_in_box(x, x))
    if (contains(t, x, bary)) return canonicalize(x, PointLocation{t, bary});
  return std::nullopt;
}

Mesh2D build_structured_mesh(int n) {
  if (n < 1) throw InvalidArgument("structured mesh needs n >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  Mesh2D mesh(std::move(vertices), std::move(triangles));
  mesh.structured_n_ = n;
  return mesh;
}

double inscribed_diameter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double perimeter = (b - a).norm() + (c - b).norm() + (a - c).norm();
  return 4.0 * std::abs(signed_area(a, b, c)) / perimeter;
}

MeshQuality mesh_quality(const Mesh2D& mesh) {
  MeshQuality q;
  q.h_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    const double h = std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
    q.h_max = std::max(q.h_max, h);
    q.h_min = std::min(q.h_min, h);
    q.shape_ratio = std::max(q.shape_ratio, h / inscribed_diameter(c[0], c[1], c[2]));
  }
  q.uniformity_ratio = q.h_max / q.h_min;
  return q;
}

} // namespace hsoc

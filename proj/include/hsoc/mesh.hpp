#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsoc {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counterclockwise rotation by 90 degrees.
inline Vec2 rotate90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// Tolerance for classifying a vertex as lying on the boundary of the square.
inline constexpr double kBoundaryTol = 1e-12;
/// Tolerance for barycentric containment tests.
inline constexpr double kBaryTol = 1e-10;

/// Triangle index plus barycentric coordinates of a located point.
struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Conforming triangulation of a polygonal subset of the unit square.
///
/// Triangles are stored counterclockwise. `neighbors()[t][k]` is the triangle
/// across the edge opposite local vertex k, or -1 on the boundary. A mesh is
/// immutable once constructed, so all queries may run concurrently.
class Mesh2D {
public:
  /// Validates the input and fixes clockwise triangles. Throws
  /// ValidationError for degenerate triangles, edges shared by more than two
  /// triangles and hanging nodes.
  /// Without explicit flags, boundary vertices are classified geometrically.
  Mesh2D(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         std::optional<std::vector<bool>> boundary_flags = std::nullopt);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<bool>& boundary_flags() const { return boundary_; }
  const std::vector<std::array<int, 3>>& neighbors() const { return neighbors_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_interior() const { return interior_vertices_.size(); }

  double h_max() const { return h_max_; }
  double area(int t) const;
  double total_area() const;
  bool is_boundary(int v) const { return boundary_[v]; }

  /// Interior degree-of-freedom index of vertex v, or -1 for boundary vertices.
  int dof(int v) const { return dof_of_vertex_[v]; }
  const std::vector<int>& interior_vertices() const { return interior_vertices_; }

  /// Triangles incident to vertex v, ascending.
  const std::vector<int>& vertex_triangles(int v) const {
    return vertex_triangles_[v];
  }

  std::array<Vec2, 3> corners(int t) const;
  std::array<double, 3> barycentric(int t, const Vec2& x) const;
  Vec2 point_from_bary(int t, const std::array<double, 3>& bary) const;

  /// Locates x in the closed domain. Among triangles containing x (within
  /// kBaryTol) the lowest index is returned. `hint` seeds the walking search
  /// used on large meshes. Returns nullopt outside the mesh.
  std::optional<PointLocation> locate(const Vec2& x, int hint = -1) const;

  /// Exhaustive scan; reference for `locate`.
  std::optional<PointLocation> locate_brute_force(const Vec2& x) const;

  /// Subdivisions per side for meshes from build_structured_mesh, else 0.
  int structured_n() const { return structured_n_; }

  /// Triangles whose bounding box overlaps [lo, hi].
  std::vector<int> triangles_in_box(const Vec2& lo, const Vec2& hi) const;

private:
  friend Mesh2D build_structured_mesh(int n);

  bool contains(int t, const Vec2& x, std::array<double, 3>& bary) const;
  std::optional<PointLocation> walk(const Vec2& x, int start) const;
  PointLocation canonicalize(const Vec2& x, PointLocation found) const;
  void build_bucket_grid();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<bool> boundary_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<std::vector<int>> vertex_triangles_;
  std::vector<int> dof_of_vertex_;
  std::vector<int> interior_vertices_;
  double h_max_ = 0.0;
  int structured_n_ = 0;

  // Uniform bucket grid over triangle bounding boxes.
  int grid_dim_ = 1;
  Vec2 grid_lo_ = Vec2::Zero();
  double grid_cell_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

/// Uniform n x n lattice on the unit square, each cell split along the
/// bottom-left to top-right diagonal. Vertex (i, j) has index j * (n + 1) + i.
Mesh2D build_structured_mesh(int n);

/// Parses Triangle .node / .ele text (0- or 1-based indices).
Mesh2D import_triangle_mesh(std::string_view node_text, std::string_view ele_text);

/// Writes Triangle .node / .ele text with 1-based indices and boundary markers.
struct TriangleFiles {
  std::string node;
  std::string ele;
};
TriangleFiles export_triangle_mesh(const Mesh2D& mesh);

struct MeshQuality {
  double h_max = 0.0;
  double h_min = 0.0;
  double shape_ratio = 0.0;      // max over T of h(T) / rho(T)
  double uniformity_ratio = 0.0; // h_max / h_min
};

/// rho(T) is the diameter of the inscribed circle, 4 * area / perimeter.
MeshQuality mesh_quality(const Mesh2D& mesh);

/// Diameter of the inscribed circle of the triangle (a, b, c).
double inscribed_diameter(const Vec2& a, const Vec2& b, const Vec2& c);

} // namespace hsoc

#include "hsoc/errors.hpp"
#include "hsoc/mesh.hpp"
#include "hsoc/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hsoc;

namespace {

const char* kUnitNode = "3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n";

} // namespace

TEST(Quadrature, TriangleRulesIntegrateMonomialsExactly) {
  // On the reference triangle, int x^i y^j = i! j! / (i + j + 2)!.
  auto exact = [](int i, int j) {
    return std::tgamma(i + 1) * std::tgamma(j + 1) / std::tgamma(i + j + 3);
  };
  for (int order : {2, 4, 6}) {
    for (int i = 0; i <= order; ++i) {
      for (int j = 0; i + j <= order; ++j) {
        double sum = 0.0;
        for (const auto& q : triangle_rule(order))
          sum += 0.5 * q.weight * std::pow(q.bary[1], i) * std::pow(q.bary[2], j);
        EXPECT_NEAR(sum, exact(i, j), 1e-14) << "order " << order << " x^" << i << " y^" << j;
      }
    }
  }
  EXPECT_EQ(triangle_rule(4).size(), 6u);
  EXPECT_EQ(triangle_rule(6).size(), 12u);
}

TEST(Quadrature, GaussLegendreOnUnitInterval) {
  const auto& rule = gauss_legendre(8);
  for (int k = 0; k < 16; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * std::pow(rule.nodes[i], k);
    EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14);
  }
}

TEST(StructuredMesh, TwoByTwoCounts) {
  const Mesh2D mesh = build_structured_mesh(2);
  EXPECT_EQ(mesh.num_vertices(), 9u);
  EXPECT_EQ(mesh.num_triangles(), 8u);
  EXPECT_EQ(mesh.num_interior(), 1u);
  EXPECT_NEAR(mesh.h_max(), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(mesh.total_area(), 1.0, 1e-15);
}

TEST(StructuredMesh, MidlineIsMadeOfEdges) {
  const Mesh2D mesh = build_structured_mesh(4);
  auto index = [](int i, int j) { return j * 5 + i; };
  for (int i = 0; i <= 4; ++i) {
    const int v = index(i, 2);
    EXPECT_NEAR(mesh.vertices()[v].x(), 0.25 * i, 1e-15);
    EXPECT_NEAR(mesh.vertices()[v].y(), 0.5, 1e-15);
  }
  for (int i = 0; i < 4; ++i) {
    const int a = index(i, 2), b = index(i + 1, 2);
    bool found = false;
    for (const auto& tri : mesh.triangles()) {
      int hits = 0;
      for (int v : tri) hits += (v == a || v == b);
      found = found || hits == 2;
    }
    EXPECT_TRUE(found) << "edge " << a << "-" << b;
  }
}

TEST(StructuredMesh, LocateRandomPointsAndAgreeWithBruteForce) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int n : {1, 3, 8, 64, 128}) {
    const Mesh2D mesh = build_structured_mesh(n);
    int hint = -1;
    for (int k = 0; k < 1000; ++k) {
      const Vec2 x(uni(rng), uni(rng));
      const auto loc = mesh.locate(x, hint);
      ASSERT_TRUE(loc) << "n=" << n;
      const Vec2 back = mesh.point_from_bary(loc->triangle, loc->bary);
      EXPECT_NEAR((back - x).norm(), 0.0, 1e-12);
      if (k % 50 == 0) {
        const auto brute = mesh.locate_brute_force(x);
        ASSERT_TRUE(brute);
        EXPECT_EQ(brute->triangle, loc->triangle);
      }
      hint = loc->triangle;
    }
  }
}

TEST(Locate, VertexCentroidAndExterior) {
  const Mesh2D mesh = build_structured_mesh(4);
  const auto at_vertex = mesh.locate(mesh.vertices()[7]);
  ASSERT_TRUE(at_vertex);
  const auto& tri = mesh.triangles()[at_vertex->triangle];
  int local = -1;
  for (int k = 0; k < 3; ++k)
    if (tri[k] == 7) local = k;
  ASSERT_GE(local, 0);
  EXPECT_NEAR(at_vertex->bary[local], 1.0, 1e-12);

  for (int t : {0, 5, 17, 31}) {
    const auto c = mesh.corners(t);
    const auto loc = mesh.locate((c[0] + c[1] + c[2]) / 3.0);
    ASSERT_TRUE(loc);
    EXPECT_EQ(loc->triangle, t);
    for (double b : loc->bary) EXPECT_NEAR(b, 1.0 / 3.0, 1e-12);
  }
  EXPECT_FALSE(mesh.locate(Vec2(2.0, 2.0)));
}

TEST(TriangleImport, SingleTriangle) {
  const Mesh2D mesh = import_triangle_mesh(kUnitNode, "1 3 0\n1 1 2 3\n");
  EXPECT_EQ(mesh.num_triangles(), 1u);
  EXPECT_NEAR(mesh.area(0), 0.5, 1e-15);
}

TEST(TriangleImport, ClockwiseTriangleIsReordered) {
  const Mesh2D mesh = import_triangle_mesh(kUnitNode, "1 3 0\n1 1 3 2\n");
  const auto c = mesh.corners(0);
  EXPECT_GT(cross(c[1] - c[0], c[2] - c[0]), 0.0);
  EXPECT_NEAR(mesh.area(0), 0.5, 1e-15);
}

TEST(TriangleImport, MissingVertexLineNamesLineFive) {
  try {
    import_triangle_mesh("4 2 0 0\n1 0 0\n2 1 0\n3 0 1\n", "1 3 0\n1 1 2 3\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(TriangleImport, CommentsAndZeroBasedIndices) {
  const Mesh2D mesh = import_triangle_mesh("# nodes\n3 2 0 0\n0 0 0\n1 1 0 # x\n2 0 1\n",
                                           "1 3 0\n0 0 1 2\n");
  EXPECT_EQ(mesh.num_triangles(), 1u);
}

TEST(TriangleImport, RejectsBadReferences) {
  EXPECT_THROW(import_triangle_mesh(kUnitNode, "1 3 0\n1 1 2 9\n"), ParseError);
  EXPECT_THROW(import_triangle_mesh(kUnitNode, "1 3 0\n1 1 1 2\n"), ValidationError);
}

TEST(TriangleImport, RoundTripIsIdentical) {
  const Mesh2D mesh = build_structured_mesh(6);
  const TriangleFiles files = export_triangle_mesh(mesh);
  const Mesh2D again = import_triangle_mesh(files.node, files.ele);
  ASSERT_EQ(again.num_vertices(), mesh.num_vertices());
  ASSERT_EQ(again.num_triangles(), mesh.num_triangles());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    EXPECT_EQ(again.vertices()[v], mesh.vertices()[v]);
    EXPECT_EQ(again.is_boundary(static_cast<int>(v)), mesh.is_boundary(static_cast<int>(v)));
  }
  EXPECT_EQ(again.triangles(), mesh.triangles());
  const TriangleFiles twice = export_triangle_mesh(again);
  EXPECT_EQ(twice.node, files.node);
  EXPECT_EQ(twice.ele, files.ele);
}

TEST(MeshValidation, HangingNodeIsRejected) {
  // Left cell split into two triangles, right cell split at the midpoint of
  // the shared edge, which leaves (0.5, 0.5) hanging on the left side.
  std::vector<Vec2> v{{0, 0}, {0.5, 0}, {1, 0}, {0, 1}, {0.5, 1}, {1, 1}, {0.5, 0.5}};
  std::vector<std::array<int, 3>> t{{0, 1, 4}, {0, 4, 3}, {1, 2, 6}, {2, 5, 6}, {6, 5, 4}};
  EXPECT_THROW(Mesh2D(v, t), ValidationError);
}

TEST(MeshValidation, DegenerateTriangleIsRejected) {
  std::vector<Vec2> v{{0, 0}, {0.5, 0.5}, {1, 1}};
  EXPECT_THROW(Mesh2D(v, {{0, 1, 2}}), ValidationError);
}

TEST(MeshQuality, StructuredFamily) {
  const MeshQuality q4 = mesh_quality(build_structured_mesh(4));
  EXPECT_DOUBLE_EQ(q4.uniformity_ratio, 1.0);
  const double ratio = q4.shape_ratio;
  for (int n : {1, 2, 8, 16, 32}) {
    const MeshQuality q = mesh_quality(build_structured_mesh(n));
    EXPECT_NEAR(q.shape_ratio, ratio, 1e-12 * ratio) << "n=" << n;
  }
}

TEST(MeshQuality, UnitRightTriangleInscribedDiameter) {
  EXPECT_NEAR(inscribed_diameter(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), 2.0 / (2.0 + std::sqrt(2.0)),
              1e-15);
}

TEST(Mesh, NeighborsAreSymmetric) {
  const Mesh2D mesh = build_structured_mesh(5);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t)
    for (int k = 0; k < 3; ++k) {
      const int o = mesh.neighbors()[t][k];
      if (o < 0) continue;
      const auto& back = mesh.neighbors()[o];
      EXPECT_TRUE(back[0] == t || back[1] == t || back[2] == t);
    }
}

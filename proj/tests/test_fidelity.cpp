#include "hsoc/errors.hpp"
#include "hsoc/fidelity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace hsoc;
using std::numbers::pi;

namespace {

FeFunction random_function(const Mesh2D& mesh, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.num_interior()));
  for (auto& x : v) x = normal(rng);
  return FeFunction(mesh, v);
}

FeFunction interpolant(const Mesh2D& mesh, const ScalarField& f) {
  const Eigen::VectorXd nodal = interpolate_nodal(mesh, f);
  Eigen::VectorXd interior(static_cast<Eigen::Index>(mesh.num_interior()));
  for (std::size_t k = 0; k < mesh.num_interior(); ++k) interior[k] = nodal[mesh.interior_vertices()[k]];
  return FeFunction(mesh, interior);
}

} // namespace

TEST(Method2, SegmentOnEdgesIntegratesOne) {
  const Mesh2D mesh = build_structured_mesh(4);
  const SurfaceAssembly s =
      assemble_surface_terms(mesh, make_segment_curve(), constant_data(1.0), FidelityMethod::PolygonalCurve, 0.25);
  EXPECT_NEAR(s.G.sum(), 0.5, 1e-14);
  EXPECT_NEAR(s.g_const, 0.5, 1e-14);

  const FeFunction one(mesh, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_interior())));
  EXPECT_NEAR(fidelity_value(s, one), 0.0, 1e-14);
  EXPECT_NEAR(fidelity_value(s, FeFunction(mesh)), 0.5 * s.g_const, 1e-15);
}

TEST(Method2, LinearDataOnEdgesIsMatchedExactly) {
  const Mesh2D mesh = build_structured_mesh(8);
  const SurfaceData linear{"x1", [](const CurvePoint& p) { return p.x.x(); }, {}};
  const SurfaceAssembly s =
      assemble_surface_terms(mesh, make_segment_curve(), linear, FidelityMethod::PolygonalCurve, 0.125);
  const FeFunction y = interpolant(mesh, [](const Vec2& x) { return x.x(); });
  EXPECT_NEAR(fidelity_value(s, y), 0.0, 1e-13);
}

TEST(Method1, CircleLength) {
  const Mesh2D mesh = build_structured_mesh(16);
  const SurfaceAssembly s = assemble_curve_terms(mesh, make_circle_curve(0.25), constant_data(1.0), 8);
  EXPECT_NEAR(s.G.sum(), pi / 2, 1e-10);
  EXPECT_NEAR(s.g_const, pi / 2, 1e-10);
}

TEST(Method1, QuadratureBreaksAtDataJump) {
  const Mesh2D mesh = build_structured_mesh(5); // segment crosses triangle interiors
  const SurfaceAssembly s = assemble_curve_terms(mesh, make_segment_curve(), jump_midflip_data(), 4);
  EXPECT_NEAR(s.G.sum(), 0.0, 1e-14);
  EXPECT_NEAR(s.g_const, 0.5, 1e-14);
}

TEST(Method1, WrongMethodForPointReductionThrows) {
  const Mesh2D mesh = build_structured_mesh(4);
  const SurfaceAssembly s = assemble_curve_terms(mesh, make_segment_curve(), constant_data(1.0));
  EXPECT_THROW(reduce_to_point_control(s), InvalidArgument);
}

TEST(PointReduction, AlignedWeights) {
  const int n = 8;
  const double h = 1.0 / n;
  const Mesh2D mesh = build_structured_mesh(n);
  const SurfaceAssembly s =
      assemble_surface_terms(mesh, make_segment_curve(), constant_data(1.0), FidelityMethod::PolygonalCurve, h);
  const PointControlData pts = reduce_to_point_control(s);
  ASSERT_EQ(pts.points.size(), 9u);
  std::multiset<long> scaled;
  for (double w : pts.weights) scaled.insert(std::lround(w / h * 6));
  // Two ends h/6, three merged interior endpoints h/3, four midpoints 2h/3.
  EXPECT_EQ(scaled, (std::multiset<long>{1, 1, 2, 2, 2, 4, 4, 4, 4}));
  EXPECT_NEAR(pts.total_weight(), 0.5, 1e-14);
}

TEST(PointReduction, SimpsonEquivalenceOnRandomStates) {
  const Mesh2D mesh = build_structured_mesh(23);
  const ParametricCurve spiral = make_spiral_curve();
  const SurfaceAssembly s =
      assemble_surface_terms(mesh, spiral, sin3pix_data(), FidelityMethod::PolygonalCurve, 0.03);
  const PointControlData pts = reduce_to_point_control(s);
  PolygonalCurve poly = polygonal_interpolation(spiral, 0.03);
  EXPECT_NEAR(pts.total_weight(), poly.total_length(), 1e-12 * poly.total_length());
  std::mt19937 rng(17);
  for (int k = 0; k < 20; ++k) {
    const FeFunction a = random_function(mesh, rng);
    const FeFunction b = random_function(mesh, rng);
    const double bilinear = a.coefficients().dot(s.M * b.coefficients());
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.points.size(); ++i)
      sum += pts.weights[i] * a.evaluate(pts.points[i]) * b.evaluate(pts.points[i]);
    EXPECT_NEAR(sum, bilinear, 1e-12 * std::abs(bilinear));
    const double line = fidelity_value(s, a);
    EXPECT_NEAR(point_fidelity_value(pts, a), line, 1e-12 * line);
  }
}

TEST(PointReduction, PointTermMatchesPointwiseValue) {
  const Mesh2D mesh = build_structured_mesh(16);
  const PointControlData pts = evenly_spaced_points(make_spiral_curve(), 41, 1.0, constant_data(1.0));
  ASSERT_EQ(pts.points.size(), 41u);
  EXPECT_NEAR((pts.points.front() - Vec2(0.5, 0.5)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(pts.total_weight(), 41.0, 1e-12);
  const FidelityTerm term = point_fidelity_term(mesh, pts);
  std::mt19937 rng(23);
  const FeFunction y = random_function(mesh, rng);
  const double v = point_fidelity_value(pts, y);
  EXPECT_NEAR(fidelity_value(term, y), v, 1e-12 * v);
}

TEST(Properties, MethodsAgreeToSecondOrderInSigma) {
  const Mesh2D mesh = build_structured_mesh(32);
  const ParametricCurve circle = make_circle_curve(0.3);
  const SurfaceData g = sin3pix_data();
  const FeFunction y = interpolant(mesh, [](const Vec2& x) { return std::sin(pi * x.x()) * x.y() * (1 - x.y()); });
  const double exact = fidelity_value(assemble_curve_terms(mesh, circle, g, 8), y);
  std::vector<double> diffs;
  for (int k = 0; k < 5; ++k) {
    const double sigma = 0.1 / std::pow(2.0, k);
    const SurfaceAssembly s = assemble_surface_terms(mesh, circle, g, FidelityMethod::PolygonalCurve, sigma);
    diffs.push_back(std::abs(fidelity_value(s, y) - exact));
  }
  for (std::size_t k = 1; k < diffs.size(); ++k) {
    const double order = std::log2(diffs[k - 1] / diffs[k]);
    EXPECT_GE(order, 1.8) << "halving " << k;
    EXPECT_LE(order, 2.2) << "halving " << k;
  }
}

TEST(Properties, Locality) {
  const Mesh2D mesh = build_structured_mesh(20);
  const SurfaceAssembly s = assemble_surface_terms(mesh, make_circle_curve(0.2), constant_data(1.0),
                                                   FidelityMethod::PolygonalCurve, 0.05);
  std::set<int> touched;
  for (const auto& sub : s.sub_segments) touched.insert(sub.triangle);
  const Eigen::VectorXd rows = s.M.cwiseAbs() * Eigen::VectorXd::Ones(s.M.cols());
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
    bool near = false;
    for (int t : mesh.vertex_triangles(v)) near = near || touched.count(t);
    if (!near) EXPECT_EQ(rows[v], 0.0) << "vertex " << v;
  }
}

TEST(Properties, UnitWeightLeavesMatrixUnchanged) {
  const Mesh2D mesh = build_structured_mesh(12);
  const ParametricCurve circle = make_circle_curve(0.25);
  const PolygonalCurve poly = polygonal_interpolation(circle, 0.04);
  const auto nodal = interpolate_surface_data(&circle, poly, sin3pix_data());
  const SurfaceAssembly plain = assemble_polygon_terms(mesh, poly, nodal);
  const SurfaceAssembly weighted = assemble_polygon_terms(mesh, poly, nodal, [](const Vec2&) { return 1.0; });
  EXPECT_EQ(SparseMatrix(plain.M - weighted.M).cwiseAbs().sum(), 0.0);
  const SurfaceAssembly c1 = assemble_curve_terms(mesh, circle, sin3pix_data());
  const SurfaceAssembly c2 = assemble_curve_terms(mesh, circle, sin3pix_data(), 8, [](const Vec2&) { return 1.0; });
  EXPECT_EQ(SparseMatrix(c1.M - c2.M).cwiseAbs().sum(), 0.0);
}

TEST(Csv, Headers) {
  const Mesh2D mesh = build_structured_mesh(4);
  const SurfaceAssembly s =
      assemble_surface_terms(mesh, make_segment_curve(), constant_data(1.0), FidelityMethod::PolygonalCurve, 0.25);
  std::ostringstream a, b;
  write_sub_segments_csv(a, s);
  write_point_control_csv(b, reduce_to_point_control(s));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "triangle,component,x0,y0,x1,y1,length");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "x,y,weight,g");
}

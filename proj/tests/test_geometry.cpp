#include "hsoc/errors.hpp"
#include "hsoc/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hsoc;
using std::numbers::pi;

TEST(Curves, SegmentMidpoint) {
  const ParametricCurve seg = make_segment_curve();
  EXPECT_NEAR((seg.position(0, 0.5) - Vec2(0.5, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(seg.total_length(), 0.5, 1e-14);
}

TEST(Curves, UnitAngleSpiralPositions) {
  const SpiralParams unit = SpiralParams::unit_angle();
  EXPECT_NEAR((spiral_position(unit, 0.0) - Vec2(0.5, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((spiral_position(unit, pi / 2) - Vec2(0.5 + 0.327 * pi / 2, 0.5)).norm(), 0.0,
              1e-14);
  // Leaves the unit square, so the curve itself cannot be built.
  EXPECT_THROW(make_spiral_curve(unit), InvalidArgument);
}

TEST(Curves, DefaultSpiralStaysInside) {
  const ParametricCurve spiral = make_spiral_curve();
  for (int k = 0; k <= 1000; ++k) {
    const Vec2 x = spiral.position(0, 3.159 * k / 1000.0);
    EXPECT_GT(x.minCoeff(), 0.0);
    EXPECT_LT(x.maxCoeff(), 1.0);
  }
}

TEST(Curves, CircleLengthAndArclengthInverse) {
  const ParametricCurve circle = make_circle_curve(0.25);
  EXPECT_NEAR(circle.total_length(), pi / 2, 1e-12);
  for (double s : {0.0, 0.1, 0.7, 1.5}) {
    const double t = circle.parameter_at_arclength(0, s);
    EXPECT_NEAR(circle.arclength_at(0, t), s, 1e-12);
  }
}

TEST(Curves, SpokesHaveSixEqualComponents) {
  const ParametricCurve spokes = make_spokes_curve();
  ASSERT_EQ(spokes.num_components(), 6u);
  for (int c = 0; c < 6; ++c) {
    EXPECT_NEAR(spokes.length(c), 0.38, 1e-12);
    EXPECT_NEAR((spokes.position(c, 0.0) - Vec2(0.5, 0.5)).norm(), 0.02, 1e-14);
  }
}

TEST(PolygonalInterpolation, SegmentSplitsEvenly) {
  const ParametricCurve seg = make_segment_curve();
  const PolygonalCurve poly = polygonal_interpolation(seg, 0.25);
  ASSERT_EQ(poly.components.size(), 1u);
  const auto& comp = poly.components[0];
  ASSERT_EQ(comp.vertices.size(), 3u);
  EXPECT_NEAR(comp.params[0], 0.0, 1e-15);
  EXPECT_NEAR(comp.params[1], 0.5, 1e-12);
  EXPECT_NEAR(comp.params[2], 1.0, 1e-15);
}

TEST(PolygonalInterpolation, CircleChordsAreEqual) {
  const ParametricCurve circle = make_circle_curve(0.25);
  const PolygonalCurve poly = polygonal_interpolation(circle, 0.1);
  const auto& comp = poly.components[0];
  ASSERT_EQ(comp.num_segments(), 16u);
  const double chord = 2 * 0.25 * std::sin(pi / 16);
  for (std::size_t k = 0; k < comp.num_segments(); ++k)
    EXPECT_NEAR((comp.vertices[k + 1] - comp.vertices[k]).norm(), chord, 1e-10);
}

TEST(PolygonalInterpolation, VerticesLieOnCurveAndAreDeterministic) {
  for (const auto& curve : {make_circle_curve(0.3), make_spiral_curve(), make_spokes_curve()}) {
    const PolygonalCurve a = polygonal_interpolation(curve, 0.03);
    const PolygonalCurve b = polygonal_interpolation(curve, 0.03);
    for (std::size_t c = 0; c < a.components.size(); ++c) {
      EXPECT_EQ(a.components[c].vertices, b.components[c].vertices);
      for (std::size_t k = 0; k < a.components[c].vertices.size(); ++k) {
        const Vec2 on = curve.position(static_cast<int>(c), a.components[c].params[k]);
        EXPECT_LE((on - a.components[c].vertices[k]).norm(), 1e-10);
      }
    }
  }
}

TEST(ClosestPoint, OnCurveAndOffCurve) {
  const ParametricCurve seg = make_segment_curve();
  const CurveProjection on = closest_point(seg, Vec2(0.4, 0.5));
  EXPECT_NEAR(on.distance, 0.0, 1e-14);
  EXPECT_NEAR((on.foot - Vec2(0.4, 0.5)).norm(), 0.0, 1e-14);

  const CurveProjection off = closest_point(seg, Vec2(0.5, 0.6));
  EXPECT_NEAR((off.foot - Vec2(0.5, 0.5)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(off.distance), 0.1, 1e-12);

  const ParametricCurve circle = make_circle_curve(0.25);
  const CurveProjection radial = closest_point(circle, Vec2(0.5 + 0.3 * std::cos(1.0), 0.5 + 0.3 * std::sin(1.0)));
  EXPECT_NEAR(std::abs(radial.distance), 0.05, 1e-12);
}

TEST(ClosestPoint, CircleCentreIsAmbiguous) {
  EXPECT_THROW(closest_point(make_circle_curve(0.25), Vec2(0.5, 0.5)), AmbiguityError);
}

TEST(SupDistance, SegmentAndCircleSagitta) {
  const ParametricCurve seg = make_segment_curve();
  EXPECT_LE(sup_distance(seg, polygonal_interpolation(seg, 0.07)), 1e-14);

  const double r = 0.25;
  const ParametricCurve circle = make_circle_curve(r);
  for (int m : {8, 16, 40}) {
    const PolygonalCurve poly = polygonal_interpolation(circle, 2 * pi * r / m);
    ASSERT_EQ(poly.components[0].num_segments(), static_cast<std::size_t>(m));
    const double sagitta = r * (1 - std::cos(pi / m));
    EXPECT_NEAR(sup_distance(circle, poly), sagitta, 0.01 * sagitta) << "m=" << m;
  }
}

TEST(SupDistance, QuartersWhenSigmaHalves) {
  const ParametricCurve circle = make_circle_curve(0.25);
  const double coarse = sup_distance(circle, polygonal_interpolation(circle, 0.05));
  const double fine = sup_distance(circle, polygonal_interpolation(circle, 0.025));
  EXPECT_NEAR(coarse / fine, 4.0, 0.4);
}

TEST(MeasureQuotient, SegmentAndCircle) {
  const ParametricCurve seg = make_segment_curve();
  EXPECT_LE(measure_quotient_dev(seg, polygonal_interpolation(seg, 0.1)), 1e-14);

  const ParametricCurve circle = make_circle_curve(0.25);
  for (int m : {8, 32}) {
    const PolygonalCurve poly = polygonal_interpolation(circle, pi / 2 / m);
    const double x = pi / m;
    const double expected = 1 - std::sin(x) / x;
    EXPECT_NEAR(measure_quotient_dev(circle, poly), expected, 0.01 * expected);
  }
  const double coarse = measure_quotient_dev(circle, polygonal_interpolation(circle, 0.05));
  const double fine = measure_quotient_dev(circle, polygonal_interpolation(circle, 0.025));
  EXPECT_NEAR(coarse / fine, 4.0, 0.4);
}

TEST(Lift, IdentityOnStraightCurve) {
  const ParametricCurve seg = make_segment_curve();
  const PolygonalCurve poly = polygonal_interpolation(seg, 0.1);
  auto f = [](const Vec2& x) { return x.x() * x.x() - 3 * x.y(); };
  std::vector<CurveParam> params;
  for (int k = 0; k <= 10; ++k) params.push_back({0, k / 10.0});
  const auto lifted = lift_values(seg, poly, f, params);
  for (std::size_t k = 0; k < params.size(); ++k)
    EXPECT_NEAR(lifted[k], f(seg.position(0, params[k].t)), 1e-14);
}

TEST(Lift, ConstantsStayConstant) {
  const ParametricCurve spiral = make_spiral_curve();
  const PolygonalCurve poly = polygonal_interpolation(spiral, 0.05);
  std::vector<CurveParam> params;
  for (int k = 0; k <= 20; ++k) params.push_back({0, 3.159 * k / 20.0});
  for (double v : lift_values(spiral, poly, [](const Vec2&) { return 2.5; }, params))
    EXPECT_EQ(v, 2.5);
}

TEST(Lift, CircleLiftPreservesAngle) {
  const ParametricCurve circle = make_circle_curve(0.25);
  const PolygonalCurve poly = polygonal_interpolation(circle, 0.08);
  auto angle = [](const Vec2& x) { return std::atan2(x.y() - 0.5, x.x() - 0.5); };
  std::vector<CurveParam> params;
  for (int k = 1; k < 30; ++k) params.push_back({0, -0.0 + 3.0 * k / 30.0});
  const auto lifted = lift_values(circle, poly, angle, params);
  for (std::size_t k = 0; k < params.size(); ++k) EXPECT_NEAR(lifted[k], params[k].t, 1e-10);
}

TEST(Lift, ProjectionOfLiftReturnsStartPoint) {
  std::mt19937 rng(11);
  for (const auto& curve : {make_circle_curve(0.25), make_spiral_curve()}) {
    const PolygonalCurve poly = polygonal_interpolation(curve, 0.02);
    const auto& comp = curve.component(0);
    std::uniform_real_distribution<double> uni(comp.t_begin, comp.t_end);
    for (int k = 0; k < 200; ++k) {
      const double t = uni(rng);
      const LiftPoint lp = lift_point(curve, poly, 0, t);
      const CurveProjection back = closest_point(curve, lp.point);
      EXPECT_LE((back.foot - curve.position(0, t)).norm(), 1e-8) << curve.name() << " t=" << t;
    }
  }
}

TEST(SurfaceData, InterpolationOfConstantsAndLinearData) {
  const ParametricCurve seg = make_segment_curve();
  const PolygonalCurve poly = polygonal_interpolation(seg, 0.1);
  const auto nodal = interpolate_surface_data(&seg, poly, constant_data(1.0));
  for (double v : nodal[0]) EXPECT_EQ(v, 1.0);
  EXPECT_LE(data_interp_error(seg, poly, constant_data(1.0)), 1e-15);
  const SurfaceData linear{"x1", [](const CurvePoint& p) { return p.x.x(); }, {}};
  EXPECT_LE(data_interp_error(seg, poly, linear), 1e-14);
}

TEST(SurfaceData, JumpReadings) {
  const ParametricCurve seg = make_segment_curve();
  const SurfaceData literal = jump_literal_data();
  const SurfaceData midflip = jump_midflip_data();
  for (double s : {0.1, 0.4, 0.6, 0.9}) {
    const CurvePoint p{0, s, seg.position(0, s)};
    EXPECT_EQ(literal.value(p), -1.0);
    EXPECT_EQ(midflip.value(p), s < 0.5 ? 1.0 : -1.0);
  }
  ASSERT_EQ(midflip.jump_fractions.size(), 1u);
  EXPECT_EQ(midflip.jump_fractions[0], 0.5);
}

TEST(SurfaceData, CircleInterpolationErrorQuarters) {
  const ParametricCurve circle = make_circle_curve(0.25);
  const SurfaceData g = sin3pix_data();
  const double coarse = data_interp_error(circle, polygonal_interpolation(circle, 0.05), g);
  const double fine = data_interp_error(circle, polygonal_interpolation(circle, 0.025), g);
  EXPECT_NEAR(coarse / fine, 4.0, 0.6);
}

TEST(GeometryReport, AssumptionRatesOnSmoothCurves) {
  // The spiral's tightest radius of curvature near its centre is about 0.02.
  const std::pair<ParametricCurve, double> cases[] = {
      {make_circle_curve(0.25), pi / 2 / 16}, {make_spiral_curve(), 0.02}};
  for (const auto& [curve, sigma0] : cases) {
    GeometryReport prev{};
    for (int k = 0; k < 4; ++k) {
      const double sigma = sigma0 / std::pow(2.0, k);
      const GeometryReport r = geometry_report(curve, polygonal_interpolation(curve, sigma), sin3pix_data());
      if (k > 0) {
        for (auto [a, b] : {std::pair{prev.sup_distance, r.sup_distance},
                            std::pair{prev.measure_quotient_dev, r.measure_quotient_dev},
                            std::pair{prev.data_interp_error, r.data_interp_error}}) {
          const double order = std::log2(a / b);
          EXPECT_GE(order, 1.8) << curve.name() << " sigma " << sigma;
          EXPECT_LE(order, 2.2) << curve.name() << " sigma " << sigma;
        }
      }
      prev = r;
    }
  }
}

TEST(GeometryReport, StraightSegmentVanishes) {
  const ParametricCurve seg = make_segment_curve();
  for (double sigma : {0.1, 0.05, 0.025}) {
    const GeometryReport r = geometry_report(seg, polygonal_interpolation(seg, sigma), constant_data(1.0));
    EXPECT_LE(r.sup_distance, 1e-12);
    EXPECT_LE(r.measure_quotient_dev, 1e-12);
    EXPECT_LE(r.data_interp_error, 1e-12);
  }
}

TEST(Polyline, CsvComponentsAndErrors) {
  const PolygonalCurve poly = read_polyline_csv("0.2,0.2\n0.4,0.2\n0.4,0.4\n\n0.6,0.6\n0.8,0.6\n");
  ASSERT_EQ(poly.components.size(), 2u);
  EXPECT_FALSE(poly.has_smooth_curve);
  EXPECT_NEAR(poly.total_length(), 0.6, 1e-14);
  EXPECT_THROW(read_polyline_csv("0.2,0.2\nfoo,0.3\n"), ParseError);
}

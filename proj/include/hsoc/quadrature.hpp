#pragma once

#include <array>
#include <span>
#include <vector>

namespace hsoc {

/// Quadrature point on the reference triangle in barycentric form.
/// Weights are normalized to sum to 1, so the physical weight is w * area.
struct TriangleQuadPoint {
  std::array<double, 3> bary;
  double weight;
};

/// Symmetric triangle rules exact for polynomials of total degree `order`.
/// Supported orders: 2 (3 points), 4 (6 points), 6 (12 points).
std::span<const TriangleQuadPoint> triangle_rule(int order);

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; cached per n.
const GaussRule& gauss_legendre(int n);

} // namespace hsoc

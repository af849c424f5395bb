#include "hsoc/quadrature.hpp"

#include "hsoc/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hsoc {
namespace {

constexpr std::array<TriangleQuadPoint, 3> kOrder2 = {{
    {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
    {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
    {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
}};

// Dunavant, degree 4.
constexpr double kA4 = 0.108103018168070, kB4 = 0.445948490915965;
constexpr double kC4 = 0.816847572980459, kD4 = 0.091576213509771;
constexpr double kW4a = 0.223381589678011, kW4b = 0.109951743655322;
constexpr std::array<TriangleQuadPoint, 6> kOrder4 = {{
    {{kA4, kB4, kB4}, kW4a},
    {{kB4, kA4, kB4}, kW4a},
    {{kB4, kB4, kA4}, kW4a},
    {{kC4, kD4, kD4}, kW4b},
    {{kD4, kC4, kD4}, kW4b},
    {{kD4, kD4, kC4}, kW4b},
}};

// Dunavant, degree 6.
constexpr double kA6 = 0.501426509658179, kB6 = 0.249286745170910;
constexpr double kC6 = 0.873821971016996, kD6 = 0.063089014491502;
constexpr double kE6 = 0.053145049844817, kF6 = 0.310352451033784,
                 kG6 = 0.636502499121399;
constexpr double kW6a = 0.116786275726379, kW6b = 0.050844906370207,
                 kW6c = 0.082851075618374;
constexpr std::array<TriangleQuadPoint, 12> kOrder6 = {{
    {{kA6, kB6, kB6}, kW6a},
    {{kB6, kA6, kB6}, kW6a},
    {{kB6, kB6, kA6}, kW6a},
    {{kC6, kD6, kD6}, kW6b},
    {{kD6, kC6, kD6}, kW6b},
    {{kD6, kD6, kC6}, kW6b},
    {{kE6, kF6, kG6}, kW6c},
    {{kE6, kG6, kF6}, kW6c},
    {{kF6, kE6, kG6}, kW6c},
    {{kF6, kG6, kE6}, kW6c},
    {{kG6, kE6, kF6}, kW6c},
    {{kG6, kF6, kE6}, kW6c},
}};

GaussRule build_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

} // namespace

std::span<const TriangleQuadPoint> triangle_rule(int order) {
  switch (order) {
  case 2:
    return kOrder2;
  case 4:
    return kOrder4;
  case 6:
    return kOrder6;
  default:
    throw InvalidArgument("unsupported triangle quadrature order " +
                          std::to_string(order));
  }
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 64)
    throw InvalidArgument("Gauss-Legendre order must be in [1, 64]");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
  return it->second;
}

} // namespace hsoc

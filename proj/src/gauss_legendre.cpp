#include "rkhs/gauss_legendre.hpp"

#include "rkhs/core.hpp"

#include <cmath>
#include <numbers>

namespace rkhs {

GaussLegendreRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(Errc::InvalidResolution, "Gauss-Legendre rule needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);

  // Roots of P_n by Newton's method from the Tricomi-type initial guess;
  // the rule is symmetric so only half the roots are computed.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      // P_n' from P_n and P_{n-1}.
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);

    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = mid;
  return rule;
}

}  // namespace rkhs

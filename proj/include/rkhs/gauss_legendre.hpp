#pragma once

#include <vector>

namespace rkhs {

struct GaussLegendreRule {
  std::vector<double> nodes;    ///< ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree
/// <= 2n - 1. Throws InvalidResolution for n == 0.
GaussLegendreRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace rkhs

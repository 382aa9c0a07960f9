#pragma once

// Hardy space H^2(D) with the uniform probability measure on the disk D_r:
//
//   min_{f in H^2} (1/|D_r|) int_{D_r} |f - g|^2 dA + |f|^2_{H^2},
//
// with g = sum b_n z^n in the Bergman space. In Taylor coefficients the
// problem decouples and the minimizer is a_n = b_n / (1 + (n+1) r^{-2n}).
// Monomials are represented by the complex measures
// d xi_k(w) = ((k+1)/pi) r^{-2k-2} w^k dA(w) restricted to D_r.

#include "rkhs/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rkhs::hardy {

enum class Space { Hardy, Bergman };

/// Finite Taylor series sum_n c_n z^n.
struct CoefficientFunction {
  std::vector<Scalar> coeffs;
  Space space = Space::Bergman;

  double hardy_norm_sq() const;    ///< sum |c_n|^2
  double bergman_norm_sq() const;  ///< sum |c_n|^2 / (n+1)
  Scalar operator()(Scalar z) const;
};

struct QuadratureSpec {
  int n_r = 64;      ///< Gauss-Legendre nodes in the radius
  int n_theta = 64;  ///< equispaced angles
};

/// Throws RadiusOutOfRange unless 0 < r < 1.
void check_radius(double r);

/// a_n = b_n / (1 + (n+1)/r^{2n}); output tagged Hardy.
CoefficientFunction euler_lagrange_coeffs(const CoefficientFunction& b, double r);

/// Density of xi_k against area measure on D_r.
struct XiMeasureSpec {
  int k = 0;
  double r = 0.5;

  Scalar density(Scalar w) const;
  double total_variation() const;
};

/// ((2k+2)/(k+2)) r^{-k}, the total variation of xi_k.
double xi_total_variation(int k, double r);

/// Polar discretization of the uniform probability measure on D_r:
/// nodes rho_j e^{i theta_l} with Gauss-Legendre rho_j on [0, r] and
/// theta_l = 2 pi l / n_theta, weights proportional to w_j rho_j.
DiscreteMeasure disk_quadrature_measure(double r, int n_r, int n_theta);

/// Area weights |D_r| * mu_j of the same nodes.
std::vector<double> disk_area_weights(const DiscreteMeasure& quad, double r);

/// Finitely supported version of xi_k on the quadrature nodes.
FMeasure discretize_xi(const XiMeasureSpec& xi, const DiscreteMeasure& quad);

/// Discretized nu_k = sum_{n < a.size()} a_n xi_n on the quadrature nodes.
FMeasure discretize_nu(const CoefficientFunction& a, double r, const DiscreteMeasure& quad);

struct MonomialRepresentationReport {
  int k = 0;
  double r = 0.0;
  QuadratureSpec quad;
  std::vector<double> errors;  ///< |int k_w(z) d xi_k(w) - z^k| per test point
  double max_error = 0.0;
  std::vector<std::string> warnings;
};

/// Checks z^k = int_{D_r} (1 - conj(w) z)^{-1} d xi_k(w) at each test point by
/// polar quadrature. Warns QuadratureTooCoarse when n_theta <= 2k + 2.
MonomialRepresentationReport verify_monomial_representation(int k, double r,
                                                           const QuadratureSpec& quad,
                                                           const std::vector<Point>& test_points);

struct TvBoundReport {
  double partial_sum = 0.0;  ///< sum_{n <= up_to} |a_n| |xi_n|
  double bound = 0.0;        ///< sqrt(sum |b_n|^2/(n+1)) sqrt(sum_n 4 r^{2n}/(n+1))
  double last_term = 0.0;    ///< |a_up_to| |xi_up_to|
  bool within_bound = false;
};

/// Partial total variation of nu against the Cauchy-Schwarz bound; the second
/// factor is summed in closed form, -4 log(1 - r^2) / r^2.
TvBoundReport nu_partial_tv_bound(const CoefficientFunction& b, double r, int up_to);

/// Sum_j mu_j / (1 - |w_j|^2) over the quadrature nodes and its ceiling
/// 1 / (1 - r^2).
struct FeatureNormCheck {
  double weighted_sum = 0.0;
  double ceiling = 0.0;
  bool ok = false;
};
FeatureNormCheck feature_norm_check(const DiscreteMeasure& quad, double r);

struct HardyDemoOptions {
  std::optional<int> truncation;  ///< M; defaults to |b| + 8
  QuadratureSpec quad;
  /// Node-basis cross-check is run when the node count does not exceed this.
  int node_basis_limit = 512;
};

struct HardyDemoReport {
  double r = 0.0;
  int truncation = 0;
  QuadratureSpec quad;
  std::size_t nodes = 0;
  std::vector<Scalar> b;
  std::vector<Scalar> computed;   ///< a_n from the discretized problem
  std::vector<Scalar> formula;    ///< a_n from the Euler-Lagrange relation
  std::vector<double> deviation;  ///< |computed - formula|
  double max_deviation = 0.0;
  double truncation_tail = 0.0;  ///< max |computed a_n| for n >= |b|
  std::optional<double> node_basis_max_deviation;
  std::vector<std::string> warnings;
};

/// Solves the discretized problem over span{1, z, ..., z^{M-1}} in the
/// monomial basis (Hardy Gram = identity) and compares with the closed form.
/// For small node sets the kernel-section basis at the nodes is solved as a
/// second route, recovering Taylor coefficients through
/// a_n = sum_j alpha_j conj(w_j)^n.
HardyDemoReport hardy_demo(const CoefficientFunction& b, double r,
                           const HardyDemoOptions& opts = {});

}  // namespace rkhs::hardy

#pragma once

// Regularized approximation against a finitely supported probability measure:
//
//   J(alpha) = sum_i mu_i c((Q alpha)_i, g_i) + (alpha^H Q alpha)^{p/2}
//
// over coefficient vectors on supp(mu). Complex coefficients are treated as
// their realification; gradients use the convention
// grad = dJ/d Re(alpha) + i dJ/d Im(alpha).

#include "rkhs/kernels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rkhs {

struct SquaredCost {};
struct PowerCost {
  double q = 2.0;  ///< |a-b|^q, q >= 1
};
struct HuberCost {
  double delta = 1.0;  ///< t^2/2 for t <= delta, delta (t - delta/2) beyond
};
struct EpsInsensitiveCost {
  double eps = 0.0;  ///< max(0, |a-b| - eps)
};

/// Convex, lower-semicontinuous cost c(a, b) applied to the residual a - b.
class CostFunction {
 public:
  using Variant = std::variant<SquaredCost, PowerCost, HuberCost, EpsInsensitiveCost>;

  explicit CostFunction(Variant v);

  static CostFunction squared() { return CostFunction(SquaredCost{}); }
  static CostFunction power(double q) { return CostFunction(PowerCost{q}); }
  static CostFunction huber(double delta) { return CostFunction(HuberCost{delta}); }
  static CostFunction eps_insensitive(double eps) {
    return CostFunction(EpsInsensitiveCost{eps});
  }

  const Variant& variant() const noexcept { return v_; }
  bool is_squared() const noexcept { return std::holds_alternative<SquaredCost>(v_); }
  std::string name() const;

  double value(Scalar a, Scalar b) const;

  /// dc/dRe(a) + i dc/dIm(a). At a kink a subgradient element is returned and
  /// `smooth` (if given) is set to false.
  Scalar derivative(Scalar a, Scalar b, bool* smooth = nullptr) const;

 private:
  Variant v_;
};

struct ProblemSpec {
  Kernel kernel = Kernel::gaussian(1.0);
  DiscreteMeasure measure;
  Vector targets;  ///< g(x_i), one per support point
  CostFunction cost = CostFunction::squared();
  double p = 2.0;  ///< regularization exponent, (0, inf)
  Field field = Field::Real;
};

/// Validated problem with its Gram matrix assembled once.
class Problem {
 public:
  /// Throws DimensionMismatch / DomainMismatch / InvalidArgument.
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const Matrix& gram() const noexcept { return q_.entries(); }
  const GramMatrix& gram_matrix() const noexcept { return q_; }
  const RealVector& weights() const noexcept { return mu_; }
  Eigen::Index size() const noexcept { return mu_.size(); }

 private:
  ProblemSpec spec_;
  GramMatrix q_;
  RealVector mu_;
};

struct ObjectiveParts {
  double data_term = 0.0;
  double reg_term = 0.0;
  double rkhs_norm = 0.0;
  double total() const { return data_term + reg_term; }
};

ObjectiveParts objective_parts(const Problem& problem, const Vector& alpha);
double objective(const Problem& problem, const Vector& alpha);

/// Euclidean gradient of J with respect to the realified coefficients.
/// At a non-smooth point a subgradient element is returned and a
/// NonSmoothPoint note is added to `diag`.
Vector gradient(const Problem& problem, const Vector& alpha, Diagnostics* diag = nullptr);

/// Riesz representer, in coefficient form, of the gradient of J on H(K):
/// d = W c'(Q alpha, g) + p |f|^{p-2} alpha, so that gradient() == Q d.
/// Its zeros are exactly the coefficient vectors a stationary f admits
/// through the representer identity.
Vector rkhs_gradient(const Problem& problem, const Vector& alpha, Diagnostics* diag = nullptr);

enum class SolveMethod { ClosedForm, Iterative };
const char* to_string(SolveMethod m);

struct Solution {
  Vector alpha;
  double objective = 0.0;
  double data_term = 0.0;
  double reg_term = 0.0;
  double rkhs_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  SolveMethod method = SolveMethod::ClosedForm;
  std::vector<double> objective_trace;  ///< accepted objective values, iterative only
  std::vector<std::string> notes;
};

/// Squared cost with p = 2: solves (W^{-1} + Q) alpha = g by Cholesky, which
/// is (I + W Q) alpha = W g scaled by W^{-1}. Throws UnsupportedCombination
/// for other costs or exponents.
Solution solve_closed_form(const Problem& problem);

enum class StepPolicy {
  Backtracking,  ///< Armijo backtracking, diminishing-step fallback at kinks
  Diminishing,   ///< t_k = t0 / sqrt(k+1), accepted only when J does not increase
};

struct IterativeOptions {
  double tol = 1e-8;
  std::size_t max_iter = 50000;
  StepPolicy step_policy = StepPolicy::Backtracking;
  /// Random initial coefficients from this seed; zero start when empty.
  std::optional<std::uint64_t> seed;
  bool record_trace = true;
};

/// Descent along the RKHS gradient with line search. Requires p >= 1
/// (UnsupportedExponent otherwise). Stops once both the relative objective
/// decrease and the relative coefficient step fall below tol.
///
/// Steps whose change in J is below the rounding level of J are judged by the
/// directional derivative (approximate Wolfe conditions) but never raise J.
/// Agreement of restarts is limited to about 1e-9 in alpha by that floor.
///
/// When the objective has kinks (Power q = 1, eps-insensitive cost, p = 1)
/// the descent first runs on smoothed objectives of shrinking width and then
/// finishes on the exact one; objective_trace covers the exact stage.
Solution solve_iterative(const Problem& problem, const IterativeOptions& opts = {});

/// Closed form when the problem admits it, iterative otherwise.
Solution solve(const Problem& problem, const IterativeOptions& opts = {});

/// Minimizes sum_j mu_j |(Phi a)_j - g_j|^2 + a^H G a over a in an arbitrary
/// finite basis with feature matrix Phi (values of the basis at the support)
/// and basis Gram G: (Phi^H W Phi + G) a = Phi^H W g.
Vector solve_weighted_ridge(const Matrix& features, const RealVector& weights,
                            const Vector& targets, const Matrix& basis_gram);

struct ProbeCertificate {
  Point probe;
  double orthogonal_norm_sq = 0.0;  ///< |k_y - P_span k_y|^2
  double min_increase = 0.0;        ///< min over t, sign of J(f + t h) - J(f)
};

struct RepresenterCertificate {
  std::vector<ProbeCertificate> probes;
  std::vector<double> steps{1e-3, 1e-2, 1e-1};
  double min_increase = 0.0;
  bool passed = false;  ///< min_increase >= -1e-9
};

/// Moves the solution off span{k_x : x in supp(mu)} along +-t h, where h is
/// the component of k_y orthogonal to the span for each probe y, and records
/// the change in objective. Probes must be in-domain and outside supp(mu).
RepresenterCertificate representer_certificate(const Problem& problem, const Solution& sol,
                                               const std::vector<Point>& probe_points);

}  // namespace rkhs

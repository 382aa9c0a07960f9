#pragma once

#include "rkhs/core.hpp"

#include <string>
#include <variant>

namespace rkhs {

struct GaussianKernel {
  double gamma = 1.0;  ///< exp(-gamma |x-y|^2)
};
struct LaplacianKernel {
  double gamma = 1.0;  ///< exp(-gamma |x-y|)
};
struct PolynomialKernel {
  int degree = 2;       ///< (<x,y> + offset)^degree
  double offset = 1.0;
};
/// Reproducing kernel of the Hardy space H^2(D): 1 / (1 - conj(w) z).
struct SzegoKernel {};
/// Reproducing kernel of the Bergman space: 1 / (1 - conj(w) z)^2.
struct BergmanKernel {};

/// One of the five built-in kernels. K(x, y) = k_y(x); the Gram entry
/// Q_ij = K(x_i, x_j) so that (Q alpha)_i is the value at x_i of
/// sum_j alpha_j k_{x_j}.
class Kernel {
 public:
  using Variant = std::variant<GaussianKernel, LaplacianKernel, PolynomialKernel,
                               SzegoKernel, BergmanKernel>;

  /// Validates parameters; throws InvalidArgument.
  explicit Kernel(Variant v);

  static Kernel gaussian(double gamma) { return Kernel(GaussianKernel{gamma}); }
  static Kernel laplacian(double gamma) { return Kernel(LaplacianKernel{gamma}); }
  static Kernel polynomial(int degree, double offset) {
    return Kernel(PolynomialKernel{degree, offset});
  }
  static Kernel szego() { return Kernel(SzegoKernel{}); }
  static Kernel bergman() { return Kernel(BergmanKernel{}); }

  const Variant& variant() const noexcept { return v_; }

  /// True for the Szego and Bergman kernels.
  bool disk_domain() const noexcept;
  /// True when every value is real (the Euclidean kernels).
  bool real_valued() const noexcept { return !disk_domain(); }
  std::string name() const;

  /// Throws DomainMismatch when p does not belong to this kernel's domain.
  void check_domain(const Point& p) const;

  /// K(x, y) without domain checks; callers validate once up front.
  Scalar operator()(const Point& x, const Point& y) const;

  /// Scaled copy, realized as a Gram-level factor; used for scale studies.
  Kernel scaled(double c) const;
  double scale() const noexcept { return scale_; }

 private:
  Variant v_;
  double scale_ = 1.0;
};

/// K(x, y) with domain checks.
Scalar eval(const Kernel& kernel, const Point& x, const Point& y);

class GramMatrix {
 public:
  GramMatrix() = default;

  /// Wraps a user-supplied matrix. Must be square, Hermitian to 1e-12
  /// relative and positive semidefinite; otherwise InvariantViolation.
  static GramMatrix from_matrix(Matrix entries);

  const Matrix& entries() const noexcept { return q_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  Eigen::Index size() const noexcept { return q_.rows(); }

 private:
  friend GramMatrix gram(const Kernel&, const std::vector<Point>&);
  Matrix q_;
  std::vector<Point> points_;
};

/// Q_ij = K(x_i, x_j). Upper triangle is evaluated and mirrored, so Q is
/// exactly Hermitian with a real diagonal.
GramMatrix gram(const Kernel& kernel, const std::vector<Point>& points);

/// Rectangular cross matrix C_ij = K(rows_i, cols_j).
Matrix cross_gram(const Kernel& kernel, const std::vector<Point>& rows,
                  const std::vector<Point>& cols);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianSpectrum {
  RealVector values;
  Matrix vectors;

  double max_abs() const;
  /// Eigenvalues above rel_tol * max(largest eigenvalue, 0) count toward
  /// the numerical range.
  std::vector<Eigen::Index> range_indices(double rel_tol) const;
};

HermitianSpectrum spectrum(const Matrix& hermitian);

double min_eigenvalue(const GramMatrix& q);
double min_eigenvalue(const Matrix& hermitian);

/// True when the smallest eigenvalue is >= -1e-9 * max(1, largest).
bool is_positive_semidefinite(const Matrix& hermitian);

/// alpha^H Q alpha, i.e. the squared RKHS norm of sum alpha_i k_{x_i}.
/// Negative round-off is clamped to 0 (warned when below -1e-9).
double rkhs_norm_sq(const Vector& alpha, const GramMatrix& q,
                    Diagnostics* diag = nullptr);
double rkhs_norm_sq(const Vector& alpha, const Matrix& q,
                    Diagnostics* diag = nullptr);

/// Values at eval_points of y -> sum_i w_i K(y, x_i), the finitely supported
/// form of the integral of the feature map against nu.
Vector embed_fmeasure(const Kernel& kernel, const FMeasure& nu,
                      const std::vector<Point>& eval_points);

}  // namespace rkhs

#pragma once

#include "rkhs/kernels.hpp"

namespace rkhs {

inline constexpr double kDefaultRankTol = 1e-10;

/// Minimum-norm least-squares fit on a finite point set.
struct InterpolationResult {
  Vector alpha;           ///< w = Q^+ v
  Vector fitted_values;   ///< Q w
  double lsq_error = 0.0; ///< |v - Q w|^2
  double rkhs_norm = 0.0; ///< sqrt(w^H Q w)
  double nullspace_residual = 0.0;  ///< |Q (v - Q w)|
  Eigen::Index rank = 0;  ///< numerical rank of Q at rank_tol
  double rank_tol = kDefaultRankTol;
};

/// Q^+ v through the eigendecomposition of Q; eigenvalues at or below
/// rank_tol * lambda_max are treated as zero. The result is orthogonal to the
/// numerical null space, and a rank-0 Q yields the zero vector.
Vector pseudo_solve(const Matrix& q, const Vector& v, double rank_tol = kDefaultRankTol);
Vector pseudo_solve(const HermitianSpectrum& s, const Vector& v,
                    double rank_tol = kDefaultRankTol);

/// Orthogonal projection of v onto the numerical range of Q.
Vector project_onto_range(const HermitianSpectrum& s, const Vector& v,
                          double rank_tol = kDefaultRankTol);

InterpolationResult min_norm_interpolate(const GramMatrix& q, const Vector& values,
                                         double rank_tol = kDefaultRankTol);

/// Among all f in H(K) minimizing sum_i |f(x_i) - v_i|^2, returns the one of
/// smallest norm as f = sum_i w_i k_{x_i}.
InterpolationResult min_norm_interpolate(const Kernel& kernel,
                                         const std::vector<Point>& points,
                                         const Vector& values,
                                         double rank_tol = kDefaultRankTol);

}  // namespace rkhs

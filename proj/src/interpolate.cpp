#include "rkhs/interpolate.hpp"

namespace rkhs {

Vector pseudo_solve(const HermitianSpectrum& s, const Vector& v, double rank_tol) {
  if (v.size() != s.values.size()) {
    throw Error(Errc::DimensionMismatch, "right-hand side does not match matrix size");
  }
  Vector out = Vector::Zero(v.size());
  for (Eigen::Index i : s.range_indices(rank_tol)) {
    const auto u = s.vectors.col(i);
    out += u * (u.dot(v) / s.values(i));
  }
  return out;
}

Vector pseudo_solve(const Matrix& q, const Vector& v, double rank_tol) {
  if (q.rows() != q.cols() || q.rows() != v.size()) {
    throw Error(Errc::DimensionMismatch, "right-hand side does not match matrix size");
  }
  return pseudo_solve(spectrum(q), v, rank_tol);
}

Vector project_onto_range(const HermitianSpectrum& s, const Vector& v, double rank_tol) {
  Vector out = Vector::Zero(v.size());
  for (Eigen::Index i : s.range_indices(rank_tol)) {
    const auto u = s.vectors.col(i);
    out += u * u.dot(v);
  }
  return out;
}

InterpolationResult min_norm_interpolate(const GramMatrix& gram_matrix, const Vector& values,
                                         double rank_tol) {
  const Matrix& q = gram_matrix.entries();
  if (values.size() != q.rows()) {
    throw Error(Errc::DimensionMismatch, "one target value per point is required");
  }
  const HermitianSpectrum s = spectrum(q);

  InterpolationResult r;
  r.rank_tol = rank_tol;
  r.rank = static_cast<Eigen::Index>(s.range_indices(rank_tol).size());
  r.alpha = pseudo_solve(s, values, rank_tol);
  r.fitted_values = q * r.alpha;
  const Vector residual = values - r.fitted_values;
  r.lsq_error = residual.squaredNorm();
  r.rkhs_norm = std::sqrt(rkhs_norm_sq(r.alpha, q));
  r.nullspace_residual = (q * residual).norm();
  return r;
}

InterpolationResult min_norm_interpolate(const Kernel& kernel, const std::vector<Point>& points,
                                         const Vector& values, double rank_tol) {
  if (values.size() != static_cast<Eigen::Index>(points.size())) {
    throw Error(Errc::DimensionMismatch, "one target value per point is required");
  }
  return min_norm_interpolate(gram(kernel, points), values, rank_tol);
}

}  // namespace rkhs

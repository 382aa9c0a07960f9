#include "rkhs/kernels.hpp"

#include <cmath>
#include <sstream>

namespace rkhs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double t = x[d] - y[d];
    s += t * t;
  }
  return s;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += x[d] * y[d];
  return s;
}

void check_same_dimension(const std::vector<Point>& points) {
  for (const Point& p : points) {
    if (p.dim() != points.front().dim()) {
      throw Error(Errc::DimensionMismatch, "Euclidean points of differing dimension");
    }
  }
}

}  // namespace

Kernel::Kernel(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const GaussianKernel& k) {
                   if (!(k.gamma > 0.0) || !std::isfinite(k.gamma))
                     throw Error(Errc::InvalidArgument, "gaussian kernel needs gamma > 0");
                 },
                 [](const LaplacianKernel& k) {
                   if (!(k.gamma > 0.0) || !std::isfinite(k.gamma))
                     throw Error(Errc::InvalidArgument, "laplacian kernel needs gamma > 0");
                 },
                 [](const PolynomialKernel& k) {
                   if (k.degree < 1)
                     throw Error(Errc::InvalidArgument, "polynomial kernel needs degree >= 1");
                   if (!(k.offset >= 0.0) || !std::isfinite(k.offset))
                     throw Error(Errc::InvalidArgument, "polynomial kernel needs offset >= 0");
                 },
                 [](const SzegoKernel&) {},
                 [](const BergmanKernel&) {},
             },
             v_);
}

bool Kernel::disk_domain() const noexcept {
  return std::holds_alternative<SzegoKernel>(v_) || std::holds_alternative<BergmanKernel>(v_);
}

std::string Kernel::name() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const GaussianKernel& k) { os << "gaussian(gamma=" << k.gamma << ")"; },
                 [&](const LaplacianKernel& k) { os << "laplacian(gamma=" << k.gamma << ")"; },
                 [&](const PolynomialKernel& k) {
                   os << "polynomial(degree=" << k.degree << ", offset=" << k.offset << ")";
                 },
                 [&](const SzegoKernel&) { os << "szego"; },
                 [&](const BergmanKernel&) { os << "bergman"; },
             },
             v_);
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

void Kernel::check_domain(const Point& p) const {
  if (disk_domain() != p.is_disk()) {
    throw Error(Errc::DomainMismatch, name() + " cannot be evaluated at " + p.to_string());
  }
}

Scalar Kernel::operator()(const Point& x, const Point& y) const {
  const Scalar value = std::visit(
      overloaded{
          [&](const GaussianKernel& k) -> Scalar {
            return std::exp(-k.gamma * squared_distance(x.coords(), y.coords()));
          },
          [&](const LaplacianKernel& k) -> Scalar {
            return std::exp(-k.gamma * std::sqrt(squared_distance(x.coords(), y.coords())));
          },
          [&](const PolynomialKernel& k) -> Scalar {
            return std::pow(dot(x.coords(), y.coords()) + k.offset, k.degree);
          },
          [&](const SzegoKernel&) -> Scalar { return 1.0 / (1.0 - std::conj(y.z()) * x.z()); },
          [&](const BergmanKernel&) -> Scalar {
            const Scalar d = 1.0 - std::conj(y.z()) * x.z();
            return 1.0 / (d * d);
          },
      },
      v_);
  return scale_ == 1.0 ? value : scale_ * value;
}

Kernel Kernel::scaled(double c) const {
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "kernel scale must be positive");
  Kernel k = *this;
  k.scale_ *= c;
  return k;
}

Scalar eval(const Kernel& kernel, const Point& x, const Point& y) {
  kernel.check_domain(x);
  kernel.check_domain(y);
  if (x.is_euclidean() && x.dim() != y.dim()) {
    throw Error(Errc::DimensionMismatch, "Euclidean points of differing dimension");
  }
  return kernel(x, y);
}

GramMatrix GramMatrix::from_matrix(Matrix entries) {
  if (entries.rows() != entries.cols()) {
    throw Error(Errc::InvariantViolation, "Gram matrix must be square");
  }
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::InvariantViolation, "Gram matrix is not Hermitian");
  }
  // Symmetrize so downstream Hermitian solvers see an exact Hermitian matrix.
  Matrix h = 0.5 * (entries + entries.adjoint());
  if (!is_positive_semidefinite(h)) {
    throw Error(Errc::InvariantViolation, "Gram matrix is not positive semidefinite");
  }
  GramMatrix g;
  g.q_ = std::move(h);
  return g;
}

GramMatrix gram(const Kernel& kernel, const std::vector<Point>& points) {
  for (const Point& p : points) kernel.check_domain(p);
  if (!points.empty() && points.front().is_euclidean()) check_same_dimension(points);
  check_distinct(points);

  const auto n = static_cast<Eigen::Index>(points.size());
  GramMatrix g;
  g.q_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Scalar v = kernel(points[i], points[j]);
      g.q_(i, j) = v;
      g.q_(j, i) = std::conj(v);
    }
    g.q_(j, j) = kernel(points[j], points[j]).real();
  }
  g.points_ = points;
  return g;
}

Matrix cross_gram(const Kernel& kernel, const std::vector<Point>& rows,
                  const std::vector<Point>& cols) {
  for (const Point& p : rows) kernel.check_domain(p);
  for (const Point& p : cols) kernel.check_domain(p);
  Matrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) = kernel(rows[i], cols[j]);
  }
  return c;
}

double HermitianSpectrum::max_abs() const {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

std::vector<Eigen::Index> HermitianSpectrum::range_indices(double rel_tol) const {
  std::vector<Eigen::Index> idx;
  if (values.size() == 0) return idx;
  const double top = values.maxCoeff();
  if (!(top > 0.0)) return idx;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > rel_tol * top) idx.push_back(i);
  }
  return idx;
}

HermitianSpectrum spectrum(const Matrix& hermitian) {
  HermitianSpectrum s;
  if (hermitian.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  s.values = es.eigenvalues();
  s.vectors = es.eigenvectors();
  return s;
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eigenvalue(const GramMatrix& q) { return min_eigenvalue(q.entries()); }

bool is_positive_semidefinite(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  return ev(0) >= -1e-9 * std::max(1.0, ev(ev.size() - 1));
}

double rkhs_norm_sq(const Vector& alpha, const Matrix& q, Diagnostics* diag) {
  if (alpha.size() != q.rows()) {
    throw Error(Errc::DimensionMismatch, "coefficient vector does not match Gram size");
  }
  const double v = alpha.dot(q * alpha).real();  // dot() conjugates its left side
  if (v < 0.0) {
    if (v < -1e-9) {
      std::ostringstream os;
      os << "negative squared norm " << v << " clamped to 0";
      warn(diag, os.str());
    }
    return 0.0;
  }
  return v;
}

double rkhs_norm_sq(const Vector& alpha, const GramMatrix& q, Diagnostics* diag) {
  return rkhs_norm_sq(alpha, q.entries(), diag);
}

Vector embed_fmeasure(const Kernel& kernel, const FMeasure& nu,
                      const std::vector<Point>& eval_points) {
  for (const Point& p : nu.points()) kernel.check_domain(p);
  for (const Point& p : eval_points) kernel.check_domain(p);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(eval_points.size()));
  for (std::size_t j = 0; j < eval_points.size(); ++j) {
    Scalar acc = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      acc += nu.weights()[i] * kernel(eval_points[j], nu.points()[i]);
    }
    out(static_cast<Eigen::Index>(j)) = acc;
  }
  return out;
}

}  // namespace rkhs

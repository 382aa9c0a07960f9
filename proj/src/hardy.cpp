#include "rkhs/hardy.hpp"

#include "rkhs/gauss_legendre.hpp"
#include "rkhs/kernels.hpp"
#include "rkhs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rkhs::hardy {

namespace {

constexpr double kPi = std::numbers::pi;

// |b_n| |xi_n| scaled by the Euler-Lagrange factor, written so that large n
// neither overflows r^{-n} nor underflows r^{2n} into 0 * inf.
double nu_term(Scalar b_n, int n, double r) {
  const double r2n = std::pow(r, 2 * n);
  return std::abs(b_n) * std::pow(r, n) * (2.0 * n + 2.0) / ((r2n + n + 1.0) * (n + 2.0));
}

}  // namespace

double CoefficientFunction::hardy_norm_sq() const {
  double s = 0.0;
  for (const Scalar& c : coeffs) s += std::norm(c);
  return s;
}

double CoefficientFunction::bergman_norm_sq() const {
  double s = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) s += std::norm(coeffs[n]) / (n + 1.0);
  return s;
}

Scalar CoefficientFunction::operator()(Scalar z) const {
  Scalar acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

void check_radius(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << "radius must lie in (0, 1), got " << r;
    throw Error(Errc::RadiusOutOfRange, os.str());
  }
}

CoefficientFunction euler_lagrange_coeffs(const CoefficientFunction& b, double r) {
  check_radius(r);
  CoefficientFunction a;
  a.space = Space::Hardy;
  a.coeffs.resize(b.coeffs.size());
  for (std::size_t n = 0; n < b.coeffs.size(); ++n) {
    // (1 + (n+1)/r^{2n}) a_n = b_n, multiplied through by r^{2n}.
    const double r2n = std::pow(r, 2.0 * static_cast<double>(n));
    a.coeffs[n] = b.coeffs[n] * (r2n / (r2n + static_cast<double>(n) + 1.0));
  }
  return a;
}

Scalar XiMeasureSpec::density(Scalar w) const {
  return ((k + 1.0) / kPi) * std::pow(r, -2.0 * k - 2.0) * std::pow(w, k);
}

double XiMeasureSpec::total_variation() const { return xi_total_variation(k, r); }

double xi_total_variation(int k, double r) {
  check_radius(r);
  if (k < 0) throw Error(Errc::InvalidArgument, "monomial index must be >= 0");
  return ((2.0 * k + 2.0) / (k + 2.0)) * std::pow(r, -k);
}

DiscreteMeasure disk_quadrature_measure(double r, int n_r, int n_theta) {
  check_radius(r);
  if (n_r < 1 || n_theta < 3) {
    throw Error(Errc::InvalidResolution, "disk quadrature needs n_r >= 1 and n_theta >= 3");
  }
  const GaussLegendreRule radial = gauss_legendre(n_r, 0.0, r);
  const double dtheta = 2.0 * kPi / n_theta;
  const double area = kPi * r * r;

  std::vector<Point> points;
  std::vector<double> weights;
  points.reserve(static_cast<std::size_t>(n_r) * n_theta);
  weights.reserve(points.capacity());
  for (int j = 0; j < n_r; ++j) {
    const double rho = radial.nodes[j];
    const double w = radial.weights[j] * rho * dtheta / area;
    for (int l = 0; l < n_theta; ++l) {
      points.push_back(Point::disk(std::polar(rho, dtheta * l)));
      weights.push_back(w);
    }
  }
  return make_discrete_measure(std::move(points), std::move(weights));
}

std::vector<double> disk_area_weights(const DiscreteMeasure& quad, double r) {
  std::vector<double> out = quad.weights();
  for (double& w : out) w *= kPi * r * r;
  return out;
}

FMeasure discretize_xi(const XiMeasureSpec& xi, const DiscreteMeasure& quad) {
  const std::vector<double> area = disk_area_weights(quad, xi.r);
  std::vector<Scalar> weights(quad.size());
  for (std::size_t j = 0; j < quad.size(); ++j) {
    weights[j] = area[j] * xi.density(quad.points()[j].z());
  }
  return FMeasure(quad.points(), std::move(weights));
}

FMeasure discretize_nu(const CoefficientFunction& a, double r, const DiscreteMeasure& quad) {
  check_radius(r);
  const std::vector<double> area = disk_area_weights(quad, r);
  std::vector<Scalar> weights(quad.size(), Scalar(0.0));
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const Scalar w = quad.points()[j].z();
    Scalar acc = 0.0;
    for (std::size_t n = 0; n < a.coeffs.size(); ++n) {
      acc += a.coeffs[n] * XiMeasureSpec{static_cast<int>(n), r}.density(w);
    }
    weights[j] = area[j] * acc;
  }
  return FMeasure(quad.points(), std::move(weights));
}

MonomialRepresentationReport verify_monomial_representation(
    int k, double r, const QuadratureSpec& quad, const std::vector<Point>& test_points) {
  check_radius(r);
  if (k < 0) throw Error(Errc::InvalidArgument, "monomial index must be >= 0");
  MonomialRepresentationReport report;
  report.k = k;
  report.r = r;
  report.quad = quad;
  if (quad.n_theta <= 2 * k + 2) {
    report.warnings.push_back("QuadratureTooCoarse: n_theta <= 2k+2 aliases the angular integral");
  }

  const DiscreteMeasure nodes = disk_quadrature_measure(r, quad.n_r, quad.n_theta);
  const FMeasure xi = discretize_xi(XiMeasureSpec{k, r}, nodes);
  const Vector values = embed_fmeasure(Kernel::szego(), xi, test_points);
  for (std::size_t i = 0; i < test_points.size(); ++i) {
    const double err =
        std::abs(values(static_cast<Eigen::Index>(i)) - std::pow(test_points[i].z(), k));
    report.errors.push_back(err);
    report.max_error = std::max(report.max_error, err);
  }
  return report;
}

TvBoundReport nu_partial_tv_bound(const CoefficientFunction& b, double r, int up_to) {
  check_radius(r);
  if (up_to < 0) throw Error(Errc::InvalidArgument, "up_to must be >= 0");
  TvBoundReport rep;
  double bergman = 0.0;
  for (std::size_t n = 0; n < b.coeffs.size(); ++n) {
    bergman += std::norm(b.coeffs[n]) / (n + 1.0);
    if (static_cast<int>(n) <= up_to) {
      const double term = nu_term(b.coeffs[n], static_cast<int>(n), r);
      rep.partial_sum += term;
      if (static_cast<int>(n) == up_to) rep.last_term = term;
    }
  }
  const double r2 = r * r;
  rep.bound = std::sqrt(bergman) * std::sqrt(-4.0 * std::log1p(-r2) / r2);
  rep.within_bound = rep.partial_sum <= rep.bound + 1e-12;
  return rep;
}

FeatureNormCheck feature_norm_check(const DiscreteMeasure& quad, double r) {
  check_radius(r);
  FeatureNormCheck c;
  for (std::size_t j = 0; j < quad.size(); ++j) {
    c.weighted_sum += quad.weights()[j] / (1.0 - std::norm(quad.points()[j].z()));
  }
  c.ceiling = 1.0 / (1.0 - r * r);
  c.ok = c.weighted_sum <= c.ceiling + 1e-9;
  return c;
}

HardyDemoReport hardy_demo(const CoefficientFunction& b, double r, const HardyDemoOptions& opts) {
  check_radius(r);
  const int nb = static_cast<int>(b.coeffs.size());
  const int m = opts.truncation.value_or(nb + 8);
  if (m < 1 || m < nb) {
    throw Error(Errc::InvalidArgument, "truncation M must be >= max(1, |b|)");
  }

  HardyDemoReport rep;
  rep.r = r;
  rep.truncation = m;
  rep.quad = opts.quad;
  rep.b = b.coeffs;
  if (opts.quad.n_theta < m || opts.quad.n_r < m) {
    rep.warnings.push_back(
        "QuadratureTooCoarse: monomial moments up to degree M are not integrated exactly");
  }

  const DiscreteMeasure quad = disk_quadrature_measure(r, opts.quad.n_r, opts.quad.n_theta);
  const auto n = static_cast<Eigen::Index>(quad.size());
  rep.nodes = quad.size();

  Matrix features(n, m);
  Vector targets(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar w = quad.points()[j].z();
    Scalar pw = 1.0;
    for (int k = 0; k < m; ++k) {
      features(j, k) = pw;
      pw *= w;
    }
    targets(j) = b(w);
  }
  const Vector a = solve_weighted_ridge(features, quad.weight_vector(), targets,
                                        Matrix::Identity(m, m));

  CoefficientFunction padded = b;
  padded.coeffs.resize(static_cast<std::size_t>(m), Scalar(0.0));
  const CoefficientFunction formula = euler_lagrange_coeffs(padded, r);

  rep.computed.assign(a.data(), a.data() + a.size());
  rep.formula = formula.coeffs;
  for (int k = 0; k < m; ++k) {
    const double dev = std::abs(rep.computed[k] - rep.formula[k]);
    rep.deviation.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (k >= nb) rep.truncation_tail = std::max(rep.truncation_tail, std::abs(rep.computed[k]));
  }

  if (static_cast<int>(quad.size()) <= opts.node_basis_limit) {
    ProblemSpec spec;
    spec.kernel = Kernel::szego();
    spec.measure = quad;
    spec.targets = targets;
    spec.cost = CostFunction::squared();
    spec.p = 2.0;
    spec.field = Field::Complex;
    const Solution sol = solve_closed_form(Problem(std::move(spec)));
    double dev = 0.0;
    for (int k = 0; k < m; ++k) {
      Scalar coeff = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        coeff += sol.alpha(j) * std::pow(std::conj(quad.points()[j].z()), k);
      }
      dev = std::max(dev, std::abs(coeff - rep.formula[k]));
    }
    rep.node_basis_max_deviation = dev;
  }
  return rep;
}

}  // namespace rkhs::hardy

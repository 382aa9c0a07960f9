#include "rkhs/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace rkhs {

const char* to_string(Field f) {
  return f == Field::Real ? "real" : "complex";
}

const char* to_string(Errc code) {
  switch (code) {
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::DuplicatePoint: return "DuplicatePoint";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::InvalidSampler: return "InvalidSampler";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnsupportedCombination: return "UnsupportedCombination";
    case Errc::UnsupportedExponent: return "UnsupportedExponent";
    case Errc::RadiusOutOfRange: return "RadiusOutOfRange";
    case Errc::InvalidResolution: return "InvalidResolution";
    case Errc::DegenerateSpan: return "DegenerateSpan";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

namespace {

double canonical(double v) { return v == 0.0 ? 0.0 : v; }

// Strict weak ordering used only for duplicate detection.
bool point_less(const Point& a, const Point& b) {
  if (a.is_disk() != b.is_disk()) return a.is_disk() < b.is_disk();
  if (a.is_disk()) {
    const Scalar za = a.z(), zb = b.z();
    if (za.real() != zb.real()) return za.real() < zb.real();
    return za.imag() < zb.imag();
  }
  return a.coords() < b.coords();
}

}  // namespace

Point Point::euclidean(std::vector<double> coords) {
  for (double& c : coords) {
    if (!std::isfinite(c)) {
      throw Error(Errc::DomainMismatch, "non-finite coordinate");
    }
    c = canonical(c);
  }
  Point p;
  p.value_ = std::move(coords);
  return p;
}

Point Point::disk(Scalar z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(std::abs(z) < 1.0)) {
    std::ostringstream os;
    os << "disk point must satisfy |z| < 1, got |z| = " << std::abs(z);
    throw Error(Errc::DomainMismatch, os.str());
  }
  Point p;
  p.value_ = Scalar(canonical(z.real()), canonical(z.imag()));
  return p;
}

const std::vector<double>& Point::coords() const {
  if (const auto* c = std::get_if<std::vector<double>>(&value_)) return *c;
  throw Error(Errc::DomainMismatch, "disk point used where a Euclidean point is required");
}

Scalar Point::z() const {
  if (const auto* z = std::get_if<Scalar>(&value_)) return *z;
  throw Error(Errc::DomainMismatch, "Euclidean point used where a disk point is required");
}

std::size_t Point::dim() const noexcept {
  if (const auto* c = std::get_if<std::vector<double>>(&value_)) return c->size();
  return 1;
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (is_disk()) {
    os << "disk(" << z().real() << (z().imag() < 0 ? "" : "+") << z().imag() << "i)";
  } else {
    os << "(";
    const auto& c = coords();
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
    os << ")";
  }
  return os.str();
}

void check_distinct(const std::vector<Point>& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return point_less(points[i], points[j]);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k - 1]] == points[order[k]]) {
      throw Error(Errc::DuplicatePoint,
                  "duplicate support point " + points[order[k]].to_string());
    }
  }
}

RealVector DiscreteMeasure::weight_vector() const {
  return Eigen::Map<const RealVector>(weights_.data(),
                                      static_cast<Eigen::Index>(weights_.size()));
}

DiscreteMeasure make_discrete_measure(std::vector<Point> points,
                                      std::vector<double> weights,
                                      Diagnostics* diag) {
  if (points.empty()) throw Error(Errc::EmptySupport, "measure has empty support");
  if (points.size() != weights.size()) {
    throw Error(Errc::DimensionMismatch, "points and weights differ in length");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(Errc::NonPositiveWeight,
                  "weight " + std::to_string(i) + " is not a positive finite number");
    }
  }
  for (const Point& p : points) {
    if (p.is_disk() != points.front().is_disk() || p.dim() != points.front().dim()) {
      throw Error(Errc::DimensionMismatch, "support points of differing kind or dimension");
    }
  }
  check_distinct(points);

  const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "weights renormalized: input mass " << mass;
    warn(diag, os.str());
  }
  for (double& w : weights) w /= mass;

  DiscreteMeasure mu;
  mu.points_ = std::move(points);
  mu.weights_ = std::move(weights);
  mu.input_mass_ = mass;
  return mu;
}

DiscreteMeasure make_uniform_measure(std::vector<Point> points) {
  const std::size_t n = points.size();
  return make_discrete_measure(std::move(points), std::vector<double>(n, 1.0));
}

FMeasure::FMeasure(std::vector<Point> points, std::vector<Scalar> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) {
    throw Error(Errc::DimensionMismatch, "points and weights differ in length");
  }
  check_distinct(points_);
}

FMeasure FMeasure::scaled(Scalar c) const {
  FMeasure out = *this;
  for (Scalar& w : out.weights_) w *= c;
  return out;
}

double total_variation(const FMeasure& xi) {
  double tv = 0.0;
  for (const Scalar& w : xi.weights()) tv += std::abs(w);
  return tv;
}

DiscreteMeasure empirical_measure(const DensitySampler& sampler, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) throw Error(Errc::EmptySupport, "empirical measure needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> points;
  points.reserve(n);

  if (const auto* box = std::get_if<UniformBoxSampler>(&sampler)) {
    if (box->lower.empty() || box->lower.size() != box->upper.size()) {
      throw Error(Errc::InvalidSampler, "box sampler bounds must be non-empty and equal length");
    }
    for (std::size_t d = 0; d < box->lower.size(); ++d) {
      if (!(box->lower[d] < box->upper[d])) {
        throw Error(Errc::InvalidSampler, "box sampler needs lower < upper in every coordinate");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(box->lower.size());
      for (std::size_t d = 0; d < x.size(); ++d) {
        x[d] = box->lower[d] + (box->upper[d] - box->lower[d]) * unit(rng);
      }
      points.push_back(Point::euclidean(std::move(x)));
    }
  } else {
    const double r = std::get<UniformDiskSampler>(sampler).radius;
    if (!(r > 0.0 && r < 1.0)) {
      throw Error(Errc::InvalidSampler, "disk sampler radius must lie in (0, 1)");
    }
    for (std::size_t i = 0; i < n; ++i) {
      // unit() is in [0,1), so rho < r strictly.
      const double rho = r * std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      points.push_back(Point::disk(std::polar(rho, theta)));
    }
  }
  return make_uniform_measure(std::move(points));
}

}  // namespace rkhs

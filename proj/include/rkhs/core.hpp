#pragma once

// Scalar field, points, finitely supported measures and the error type shared
// by every other module.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rkhs {

using Scalar = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Scalar field of a problem. Values are always stored as complex numbers;
/// a real problem keeps every imaginary part at zero.
enum class Field { Real, Complex };

const char* to_string(Field f);

enum class Errc {
  NonPositiveWeight,
  DuplicatePoint,
  EmptySupport,
  InvalidSampler,
  DomainMismatch,
  DimensionMismatch,
  UnsupportedCombination,
  UnsupportedExponent,
  RadiusOutOfRange,
  InvalidResolution,
  DegenerateSpan,
  InvalidArgument,
  SchemaError,
  InvariantViolation,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Non-fatal notes collected along a computation (renormalization, clamping,
/// coarse quadrature, ...). Passed by pointer; nullptr discards them.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

/// A point of the domain X: either a Euclidean coordinate vector or a point of
/// the open unit disk.
class Point {
 public:
  Point() = default;

  static Point euclidean(std::vector<double> coords);
  /// Throws DomainMismatch unless |z| < 1.
  static Point disk(Scalar z);

  bool is_disk() const noexcept { return std::holds_alternative<Scalar>(value_); }
  bool is_euclidean() const noexcept { return !is_disk(); }

  /// Coordinates of a Euclidean point; DomainMismatch for disk points.
  const std::vector<double>& coords() const;
  /// Complex coordinate of a disk point; DomainMismatch for Euclidean points.
  Scalar z() const;

  std::size_t dim() const noexcept;

  friend bool operator==(const Point& a, const Point& b) noexcept {
    return a.value_ == b.value_;
  }

  std::string to_string() const;

 private:
  // Stored canonicalized: -0.0 folded to +0.0 so equality is exact.
  std::variant<std::vector<double>, Scalar> value_{std::vector<double>{}};
};

/// Throws DuplicatePoint if two points compare equal.
void check_distinct(const std::vector<Point>& points);

/// Finitely supported probability measure with strictly positive weights.
class DiscreteMeasure {
 public:
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

  /// Sum of the weights as supplied, before renormalization.
  double input_mass() const noexcept { return input_mass_; }

  RealVector weight_vector() const;

 private:
  friend DiscreteMeasure make_discrete_measure(std::vector<Point>,
                                               std::vector<double>,
                                               Diagnostics*);
  std::vector<Point> points_;
  std::vector<double> weights_;
  double input_mass_ = 1.0;
};

/// Builds a probability measure, renormalizing the weights to sum to 1.
/// A renormalization factor differing from 1 by more than 1e-9 is reported in
/// `diag`.
DiscreteMeasure make_discrete_measure(std::vector<Point> points,
                                      std::vector<double> weights,
                                      Diagnostics* diag = nullptr);

/// Uniform weights 1/n over the given points.
DiscreteMeasure make_uniform_measure(std::vector<Point> points);

/// Finitely supported signed or complex measure.
class FMeasure {
 public:
  FMeasure() = default;
  FMeasure(std::vector<Point> points, std::vector<Scalar> weights);

  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<Scalar>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

  FMeasure scaled(Scalar c) const;

 private:
  std::vector<Point> points_;
  std::vector<Scalar> weights_;
};

/// Sum of |w_i|.
double total_variation(const FMeasure& xi);

struct UniformBoxSampler {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Uniform on the open disk of radius r centered at 0, r in (0, 1).
struct UniformDiskSampler {
  double radius = 0.5;
};

using DensitySampler = std::variant<UniformBoxSampler, UniformDiskSampler>;

/// n i.i.d. draws from `sampler` with equal weights 1/n; bitwise reproducible
/// for a given seed.
DiscreteMeasure empirical_measure(const DensitySampler& sampler, std::size_t n,
                                  std::uint64_t seed);

}  // namespace rkhs

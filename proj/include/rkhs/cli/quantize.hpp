#pragma once

// Empirical-measure study: for growing N, replace mu by mu_N built from N
// samples, solve the regularized problem on supp(mu_N), and track how the
// optimizer's values at fixed probe points settle.

#include "rkhs/cli/json_io.hpp"

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace rkhs::cli {

/// g(z) = sum_n b_n z^n on the disk.
struct BergmanTarget {
  hardy::CoefficientFunction b;
};
/// g(x) = intercept + <slope, x>.
struct AffineTarget {
  double intercept = 0.0;
  std::vector<double> slope;
};
/// g(x) = sum_k c_k x_0^k, univariate in the first coordinate.
struct PolynomialTarget {
  std::vector<double> coeffs;
};

using TargetSpec = std::variant<BergmanTarget, AffineTarget, PolynomialTarget>;

Scalar evaluate_target(const TargetSpec& target, const Point& x);

struct QuantizeStudySpec {
  DensitySampler sampler;
  TargetSpec target;
  Kernel kernel = Kernel::gaussian(1.0);
  CostFunction cost = CostFunction::squared();
  double p = 2.0;
  std::vector<std::size_t> n_values;  ///< strictly increasing
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::vector<Point> probes;  ///< defaults chosen from the sampler when empty
  IterativeOptions solver;

  Field field() const;
};

struct QuantizeRow {
  std::size_t n = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double rkhs_norm = 0.0;
  double probe_drift = 0.0;  ///< max over other repetitions of max_j |f(y_j) - f'(y_j)|
  bool converged = true;
  std::vector<Scalar> probe_values;
  std::optional<double> formula_deviation;
};

struct QuantizeStudyResult {
  std::vector<Point> probes;
  std::vector<QuantizeRow> rows;  ///< ordered by (N, repetition)
  std::vector<double> median_drift;   ///< per N
  std::vector<double> cross_n_drift;  ///< per N after the first: mean probe values vs previous N
  /// Probe values of the continuous-measure optimizer, when it is known in
  /// closed form (disk sampler, Bergman target, Szego kernel, squared cost, p = 2).
  std::optional<std::vector<Scalar>> formula_probe_values;
};

/// Throws InvalidArgument when N values are not strictly increasing or
/// repetitions is 0.
void validate(const QuantizeStudySpec& spec);

std::vector<Point> default_probes(const DensitySampler& sampler);

/// Seed of cell (n_index, repetition); independent of evaluation order.
std::uint64_t cell_seed(std::uint64_t base, std::size_t n_index, std::size_t repetition);

QuantizeStudyResult run_quantize_study(QuantizeStudySpec spec);

QuantizeStudySpec parse_quantize_spec(const json& doc);

/// Columns: N, repetition, objective, rkhs_norm, probe_drift.
void write_quantize_csv(const QuantizeStudyResult& result, std::ostream& os);
json to_json(const QuantizeStudyResult& result, Field field);

}  // namespace rkhs::cli

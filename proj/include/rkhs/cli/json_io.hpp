#pragma once

// Problem-file parsing and result serialization. Complex numbers are written
// as [re, im]; real-field values as plain numbers. Every object is read in
// strict mode: an unknown key is a SchemaError naming its path.

#include "rkhs/frames.hpp"
#include "rkhs/hardy.hpp"
#include "rkhs/interpolate.hpp"
#include "rkhs/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace rkhs::cli {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "rkhs-approx/1";

/// Strict reader over one JSON object. Keys must be declared through
/// required()/optional() before finish(), which rejects anything else.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path);

  const json& required(std::string_view key);
  const json* optional(std::string_view key);
  void finish() const;

  std::string path_of(std::string_view key) const;
  const std::string& path() const noexcept { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

[[noreturn]] void schema_error(const std::string& path, const std::string& message);

double get_number(const json& j, const std::string& path);
std::int64_t get_integer(const json& j, const std::string& path);
std::string get_string(const json& j, const std::string& path);
Scalar get_scalar(const json& j, Field field, const std::string& path);
/// Series coefficient: a plain number or a [re, im] pair.
Scalar get_coefficient(const json& j, const std::string& path);

json scalar_to_json(Scalar v, Field field);
json vector_to_json(const Vector& v, Field field);

Kernel parse_kernel(const json& j, const std::string& path);
json kernel_to_json(const Kernel& k);
CostFunction parse_cost(const json& j, const std::string& path);
json cost_to_json(const CostFunction& c);
Point parse_point(const json& j, bool disk, const std::string& path);
json point_to_json(const Point& p);

struct SolverConfig {
  enum class Method { Auto, ClosedForm, Iterative } method = Method::Auto;
  IterativeOptions options;
};

struct FrameConfig {
  double p = 2.0;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::size_t bins = 20;
};

/// Everything a problem file may hold. Which parts are required depends on
/// the command consuming it.
struct ProblemFile {
  Field field = Field::Real;
  std::optional<Kernel> kernel;
  std::optional<Matrix> explicit_gram;  ///< from kernel {"type": "gram", "csv": path}
  std::vector<Point> points;
  std::optional<std::vector<double>> weights;
  std::optional<Vector> targets;
  std::optional<CostFunction> cost;
  std::optional<double> p;
  SolverConfig solver;
  double rank_tol = kDefaultRankTol;
  FrameConfig frame;
};

/// `base_dir` resolves relative Gram CSV paths.
ProblemFile parse_problem_file(const json& doc, const std::string& base_dir = ".");

/// Fully validated problem for the solver. Requires kernel, points, targets,
/// cost and p; weights default to uniform.
ProblemSpec parse_problem(const json& doc, Diagnostics* diag = nullptr,
                          SolverConfig* solver = nullptr);
ProblemSpec parse_problem(std::string_view text, Diagnostics* diag = nullptr,
                          SolverConfig* solver = nullptr);
ProblemSpec to_problem_spec(const ProblemFile& file, Diagnostics* diag);

json serialize_problem(const ProblemSpec& spec, const SolverConfig& solver = {});

json to_json(const InterpolationResult& r, Field field);
json to_json(const Solution& s, Field field);
json to_json(const NormEquivalenceReport& r);
json to_json(const hardy::HardyDemoReport& r);

/// Row-major CSV; complex entries as "a+bi", real ones as plain numbers.
void write_gram_csv(const Matrix& q, std::ostream& os);
Matrix read_gram_csv(std::istream& is);
Scalar parse_complex_text(std::string_view text);
std::string format_complex_text(Scalar v);

/// "sha256:<hex>" of the canonical dump of `doc`.
std::string inputs_digest(const json& doc);

}  // namespace rkhs::cli

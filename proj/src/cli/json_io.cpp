#include "rkhs/cli/json_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rkhs::cli {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

}  // namespace

void schema_error(const std::string& path, const std::string& message) {
  throw Error(Errc::SchemaError, path + ": " + message);
}

ObjectReader::ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) schema_error(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string ObjectReader::path_of(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

const json& ObjectReader::required(std::string_view key) {
  seen_.emplace_back(key);
  auto it = j_.find(std::string(key));
  if (it == j_.end()) schema_error(path_of(key), "missing required key");
  return *it;
}

const json* ObjectReader::optional(std::string_view key) {
  seen_.emplace_back(key);
  auto it = j_.find(std::string(key));
  return it == j_.end() ? nullptr : &*it;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
      schema_error(path_of(it.key()), "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

Scalar get_scalar(const json& j, Field field, const std::string& path) {
  if (field == Field::Real) return get_number(j, path);
  if (!j.is_array() || j.size() != 2) schema_error(path, "expected a [re, im] pair");
  return {get_number(j[0], index_path(path, 0)), get_number(j[1], index_path(path, 1))};
}

Scalar get_coefficient(const json& j, const std::string& path) {
  return j.is_number() ? Scalar(get_number(j, path)) : get_scalar(j, Field::Complex, path);
}

json scalar_to_json(Scalar v, Field field) {
  if (field == Field::Real) return v.real();
  return json::array({v.real(), v.imag()});
}

json vector_to_json(const Vector& v, Field field) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i), field));
  return out;
}

Kernel parse_kernel(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string type = get_string(r.required("type"), r.path_of("type"));
  std::optional<Kernel> k;
  try {
    if (type == "gaussian") {
      k = Kernel::gaussian(get_number(r.required("gamma"), r.path_of("gamma")));
    } else if (type == "laplacian") {
      k = Kernel::laplacian(get_number(r.required("gamma"), r.path_of("gamma")));
    } else if (type == "polynomial") {
      const auto degree = get_integer(r.required("degree"), r.path_of("degree"));
      const json* off = r.optional("offset");
      k = Kernel::polynomial(static_cast<int>(degree),
                             off ? get_number(*off, r.path_of("offset")) : 1.0);
    } else if (type == "szego") {
      k = Kernel::szego();
    } else if (type == "bergman") {
      k = Kernel::bergman();
    } else {
      schema_error(r.path_of("type"), "unknown kernel type \"" + type + "\"");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaError) throw;
    throw Error(Errc::InvariantViolation, path + ": " + e.what());
  }
  r.finish();
  return *k;
}

json kernel_to_json(const Kernel& k) {
  return std::visit(overloaded{
                        [](const GaussianKernel& g) {
                          return json{{"type", "gaussian"}, {"gamma", g.gamma}};
                        },
                        [](const LaplacianKernel& g) {
                          return json{{"type", "laplacian"}, {"gamma", g.gamma}};
                        },
                        [](const PolynomialKernel& g) {
                          return json{{"type", "polynomial"},
                                      {"degree", g.degree},
                                      {"offset", g.offset}};
                        },
                        [](const SzegoKernel&) { return json{{"type", "szego"}}; },
                        [](const BergmanKernel&) { return json{{"type", "bergman"}}; },
                    },
                    k.variant());
}

CostFunction parse_cost(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string type = get_string(r.required("type"), r.path_of("type"));
  std::optional<CostFunction> c;
  try {
    if (type == "squared") {
      c = CostFunction::squared();
    } else if (type == "power") {
      c = CostFunction::power(get_number(r.required("q"), r.path_of("q")));
    } else if (type == "huber") {
      c = CostFunction::huber(get_number(r.required("delta"), r.path_of("delta")));
    } else if (type == "eps_insensitive") {
      c = CostFunction::eps_insensitive(get_number(r.required("eps"), r.path_of("eps")));
    } else {
      schema_error(r.path_of("type"), "unknown cost type \"" + type + "\"");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaError) throw;
    throw Error(Errc::InvariantViolation, path + ": " + e.what());
  }
  r.finish();
  return *c;
}

json cost_to_json(const CostFunction& c) {
  return std::visit(overloaded{
                        [](const SquaredCost&) { return json{{"type", "squared"}}; },
                        [](const PowerCost& p) { return json{{"type", "power"}, {"q", p.q}}; },
                        [](const HuberCost& h) {
                          return json{{"type", "huber"}, {"delta", h.delta}};
                        },
                        [](const EpsInsensitiveCost& e) {
                          return json{{"type", "eps_insensitive"}, {"eps", e.eps}};
                        },
                    },
                    c.variant());
}

Point parse_point(const json& j, bool disk, const std::string& path) {
  try {
    if (disk) {
      if (!j.is_array() || j.size() != 2) schema_error(path, "expected a [re, im] pair");
      return Point::disk({get_number(j[0], index_path(path, 0)),
                          get_number(j[1], index_path(path, 1))});
    }
    if (j.is_number()) return Point::euclidean({get_number(j, path)});
    require_array(j, path);
    if (j.empty()) schema_error(path, "expected at least one coordinate");
    std::vector<double> c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(get_number(j[i], index_path(path, i)));
    return Point::euclidean(std::move(c));
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaError) throw;
    throw Error(Errc::InvariantViolation, path + ": " + e.what());
  }
}

json point_to_json(const Point& p) {
  if (p.is_disk()) return json::array({p.z().real(), p.z().imag()});
  return json(p.coords());
}

namespace {

SolverConfig parse_solver(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SolverConfig cfg;
  if (const json* m = r.optional("method")) {
    const std::string method = get_string(*m, r.path_of("method"));
    if (method == "auto") cfg.method = SolverConfig::Method::Auto;
    else if (method == "closed_form") cfg.method = SolverConfig::Method::ClosedForm;
    else if (method == "iterative") cfg.method = SolverConfig::Method::Iterative;
    else schema_error(r.path_of("method"), "unknown solver method \"" + method + "\"");
  }
  if (const json* t = r.optional("tol")) {
    cfg.options.tol = get_number(*t, r.path_of("tol"));
    if (!(cfg.options.tol > 0.0)) schema_error(r.path_of("tol"), "must be positive");
  }
  if (const json* m = r.optional("max_iter")) {
    const auto v = get_integer(*m, r.path_of("max_iter"));
    if (v < 1) schema_error(r.path_of("max_iter"), "must be >= 1");
    cfg.options.max_iter = static_cast<std::size_t>(v);
  }
  if (const json* s = r.optional("seed")) {
    cfg.options.seed = static_cast<std::uint64_t>(get_integer(*s, r.path_of("seed")));
  }
  if (const json* s = r.optional("step_policy")) {
    const std::string policy = get_string(*s, r.path_of("step_policy"));
    if (policy == "backtracking") cfg.options.step_policy = StepPolicy::Backtracking;
    else if (policy == "diminishing") cfg.options.step_policy = StepPolicy::Diminishing;
    else schema_error(r.path_of("step_policy"), "unknown step policy \"" + policy + "\"");
  }
  r.finish();
  return cfg;
}

FrameConfig parse_frame(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  FrameConfig cfg;
  if (const json* p = r.optional("p")) cfg.p = get_number(*p, r.path_of("p"));
  if (const json* n = r.optional("n_samples")) {
    const auto v = get_integer(*n, r.path_of("n_samples"));
    if (v < 1) schema_error(r.path_of("n_samples"), "must be >= 1");
    cfg.n_samples = static_cast<std::size_t>(v);
  }
  if (const json* s = r.optional("seed")) {
    cfg.seed = static_cast<std::uint64_t>(get_integer(*s, r.path_of("seed")));
  }
  if (const json* b = r.optional("bins")) {
    const auto v = get_integer(*b, r.path_of("bins"));
    if (v < 1) schema_error(r.path_of("bins"), "must be >= 1");
    cfg.bins = static_cast<std::size_t>(v);
  }
  r.finish();
  return cfg;
}

}  // namespace

ProblemFile parse_problem_file(const json& doc, const std::string& base_dir) {
  ObjectReader r(doc, "");
  ProblemFile f;

  std::optional<Field> field;
  if (const json* j = r.optional("field")) {
    const std::string s = get_string(*j, "field");
    if (s == "real") field = Field::Real;
    else if (s == "complex") field = Field::Complex;
    else schema_error("field", "expected \"real\" or \"complex\"");
  }

  const json& kj = r.required("kernel");
  bool disk = false;
  if (kj.is_object() && kj.contains("type") && kj["type"] == "gram") {
    ObjectReader kr(kj, "kernel");
    kr.required("type");
    std::filesystem::path csv = get_string(kr.required("csv"), "kernel.csv");
    kr.finish();
    if (csv.is_relative()) csv = std::filesystem::path(base_dir) / csv;
    std::ifstream in(csv);
    if (!in) schema_error("kernel.csv", "cannot open " + csv.string());
    try {
      f.explicit_gram = GramMatrix::from_matrix(read_gram_csv(in)).entries();
    } catch (const Error& e) {
      if (e.code() == Errc::SchemaError) throw;
      throw Error(Errc::InvariantViolation, std::string("kernel.csv: ") + e.what());
    }
  } else {
    f.kernel = parse_kernel(kj, "kernel");
    disk = f.kernel->disk_domain();
  }

  if (field) {
    f.field = *field;
    if (disk && f.field == Field::Real) {
      throw Error(Errc::InvariantViolation, "field: disk kernels require \"complex\"");
    }
  } else {
    f.field = disk ? Field::Complex : Field::Real;
  }

  if (f.kernel) {
    const json& pts = require_array(r.required("points"), "points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      f.points.push_back(parse_point(pts[i], disk, index_path("points", i)));
    }
    if (f.points.empty()) throw Error(Errc::InvariantViolation, "points: empty support");
    try {
      check_distinct(f.points);
    } catch (const Error& e) {
      throw Error(Errc::InvariantViolation, std::string("points: DuplicatePoint: ") + e.what());
    }
    for (std::size_t i = 1; i < f.points.size(); ++i) {
      if (f.points[i].dim() != f.points[0].dim()) {
        schema_error(index_path("points", i), "coordinate dimension differs from points[0]");
      }
    }
  } else if (const json* pts = r.optional("points")) {
    schema_error("points", "points are not used with an explicit Gram matrix");
    (void)pts;
  }
  const std::size_t n = f.kernel ? f.points.size()
                                 : static_cast<std::size_t>(f.explicit_gram->rows());

  if (const json* w = r.optional("weights")) {
    require_array(*w, "weights");
    std::vector<double> weights;
    for (std::size_t i = 0; i < w->size(); ++i) {
      weights.push_back(get_number((*w)[i], index_path("weights", i)));
    }
    if (weights.size() != n) schema_error("weights", "expected one weight per point");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
        throw Error(Errc::InvariantViolation,
                    index_path("weights", i) +
                        ": NonPositiveWeight: weights must be positive and finite");
      }
    }
    f.weights = std::move(weights);
  }
  if (const json* t = r.optional("targets")) {
    require_array(*t, "targets");
    if (t->size() != n) schema_error("targets", "expected one target per point");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      v(static_cast<Eigen::Index>(i)) = get_scalar((*t)[i], f.field, index_path("targets", i));
    }
    f.targets = std::move(v);
  }
  if (const json* c = r.optional("cost")) f.cost = parse_cost(*c, "cost");
  if (const json* p = r.optional("p")) {
    f.p = get_number(*p, "p");
    if (!(*f.p > 0.0)) throw Error(Errc::InvariantViolation, "p: must be positive");
  }
  if (const json* s = r.optional("solver")) f.solver = parse_solver(*s, "solver");
  if (const json* ij = r.optional("interpolate")) {
    ObjectReader ir(*ij, "interpolate");
    if (const json* t = ir.optional("rank_tol")) {
      f.rank_tol = get_number(*t, "interpolate.rank_tol");
      if (!(f.rank_tol >= 0.0)) schema_error("interpolate.rank_tol", "must be >= 0");
    }
    ir.finish();
  }
  if (const json* fj = r.optional("frame")) f.frame = parse_frame(*fj, "frame");
  r.finish();
  return f;
}

ProblemSpec to_problem_spec(const ProblemFile& file, Diagnostics* diag) {
  if (!file.kernel) {
    schema_error("kernel", "the solver needs a kernel, not an explicit Gram matrix");
  }
  if (!file.targets) schema_error("targets", "missing required key");
  if (!file.cost) schema_error("cost", "missing required key");
  if (!file.p) schema_error("p", "missing required key");

  ProblemSpec spec;
  spec.kernel = *file.kernel;
  spec.field = file.field;
  try {
    spec.measure = file.weights ? make_discrete_measure(file.points, *file.weights, diag)
                                : make_uniform_measure(file.points);
  } catch (const Error& e) {
    throw Error(Errc::InvariantViolation, std::string(to_string(e.code())) + ": " + e.what());
  }
  spec.targets = *file.targets;
  spec.cost = *file.cost;
  spec.p = *file.p;
  try {
    Problem check(spec);
  } catch (const Error& e) {
    throw Error(Errc::InvariantViolation, std::string(to_string(e.code())) + ": " + e.what());
  }
  return spec;
}

ProblemSpec parse_problem(const json& doc, Diagnostics* diag, SolverConfig* solver) {
  const ProblemFile file = parse_problem_file(doc);
  if (solver != nullptr) *solver = file.solver;
  return to_problem_spec(file, diag);
}

ProblemSpec parse_problem(std::string_view text, Diagnostics* diag, SolverConfig* solver) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, std::string("<root>: invalid JSON: ") + e.what());
  }
  return parse_problem(doc, diag, solver);
}

json serialize_problem(const ProblemSpec& spec, const SolverConfig& solver) {
  json doc;
  doc["field"] = to_string(spec.field);
  doc["kernel"] = kernel_to_json(spec.kernel);
  json pts = json::array();
  for (const Point& p : spec.measure.points()) pts.push_back(point_to_json(p));
  doc["points"] = std::move(pts);
  doc["weights"] = spec.measure.weights();
  doc["targets"] = vector_to_json(spec.targets, spec.field);
  doc["cost"] = cost_to_json(spec.cost);
  doc["p"] = spec.p;

  json s;
  switch (solver.method) {
    case SolverConfig::Method::Auto: s["method"] = "auto"; break;
    case SolverConfig::Method::ClosedForm: s["method"] = "closed_form"; break;
    case SolverConfig::Method::Iterative: s["method"] = "iterative"; break;
  }
  s["tol"] = solver.options.tol;
  s["max_iter"] = solver.options.max_iter;
  if (solver.options.seed) s["seed"] = *solver.options.seed;
  s["step_policy"] =
      solver.options.step_policy == StepPolicy::Backtracking ? "backtracking" : "diminishing";
  doc["solver"] = std::move(s);
  return doc;
}

json to_json(const InterpolationResult& r, Field field) {
  return json{
      {"alpha", vector_to_json(r.alpha, field)},
      {"fitted_values", vector_to_json(r.fitted_values, field)},
      {"lsq_error", r.lsq_error},
      {"rkhs_norm", r.rkhs_norm},
      {"nullspace_residual", r.nullspace_residual},
      {"rank", r.rank},
      {"rank_tol", r.rank_tol},
      {"rank_policy", "eigenvalues <= rank_tol * lambda_max treated as zero"},
  };
}

json to_json(const Solution& s, Field field) {
  return json{
      {"alpha", vector_to_json(s.alpha, field)},
      {"objective", s.objective},
      {"data_term", s.data_term},
      {"reg_term", s.reg_term},
      {"rkhs_norm", s.rkhs_norm},
      {"iterations", s.iterations},
      {"converged", s.converged},
      {"method", to_string(s.method)},
      {"notes", s.notes},
  };
}

json to_json(const NormEquivalenceReport& r) {
  json hist = json::array();
  for (const HistogramBin& b : r.histogram) {
    hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  }
  json out{
      {"p", r.p},
      {"sampled", {{"lower", r.lower}, {"upper", r.upper}, {"n_samples", r.ratios.size()}}},
      {"c1", r.c1},
      {"c2", r.c2},
      {"rank", r.rank},
      {"support_size", r.support},
      {"full_rank", r.full_rank},
      {"note", r.note},
      {"histogram", std::move(hist)},
  };
  if (r.exact) {
    out["exact"] = {{"method", to_string(r.exact->method)},
                    {"lower", r.exact->lower},
                    {"upper", r.exact->upper},
                    {"c1", std::sqrt(r.exact->lower)},
                    {"c2", std::sqrt(r.exact->upper)}};
  } else {
    out["exact"] = nullptr;
  }
  return out;
}

json to_json(const hardy::HardyDemoReport& r) {
  json rows = json::array();
  for (std::size_t n = 0; n < r.computed.size(); ++n) {
    const Scalar b = n < r.b.size() ? r.b[n] : Scalar(0.0);
    rows.push_back({{"n", n},
                    {"b", scalar_to_json(b, Field::Complex)},
                    {"formula", scalar_to_json(r.formula[n], Field::Complex)},
                    {"computed", scalar_to_json(r.computed[n], Field::Complex)},
                    {"deviation", r.deviation[n]}});
  }
  json out{
      {"r", r.r},
      {"truncation", r.truncation},
      {"quadrature", {{"n_r", r.quad.n_r}, {"n_theta", r.quad.n_theta}}},
      {"nodes", r.nodes},
      {"coefficients", std::move(rows)},
      {"max_deviation", r.max_deviation},
      {"truncation_tail", r.truncation_tail},
      {"warnings", r.warnings},
  };
  out["node_basis_max_deviation"] =
      r.node_basis_max_deviation ? json(*r.node_basis_max_deviation) : json(nullptr);
  return out;
}

std::string format_complex_text(Scalar v) {
  char buf[96];
  if (v.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", v.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  }
  return buf;
}

Scalar parse_complex_text(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto fail = [&]() -> Scalar {
    throw Error(Errc::SchemaError, "gram csv: cannot parse \"" + std::string(text) + "\"");
  };
  if (s.empty()) return fail();
  try {
    if (s.back() != 'i') {
      std::size_t used = 0;
      const double re = std::stod(s, &used);
      if (used != s.size()) return fail();
      return re;
    }
    s.pop_back();
    // Split at the last sign that is not part of an exponent or leading sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    std::size_t used = 0;
    if (split == std::string::npos) {
      const std::string im = s.empty() || s == "+" || s == "-" ? s + "1" : s;
      const double v = std::stod(im, &used);
      if (used != im.size()) return fail();
      return {0.0, v};
    }
    const std::string re_s = s.substr(0, split);
    std::string im_s = s.substr(split);
    if (im_s == "+" || im_s == "-") im_s += "1";
    const double re = std::stod(re_s, &used);
    if (used != re_s.size()) return fail();
    const double im = std::stod(im_s, &used);
    if (used != im_s.size()) return fail();
    return {re, im};
  } catch (const std::logic_error&) {
    return fail();
  }
}

void write_gram_csv(const Matrix& q, std::ostream& os) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      os << (j ? "," : "") << format_complex_text(q(i, j));
    }
    os << '\n';
  }
}

Matrix read_gram_csv(std::istream& is) {
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<Scalar> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_complex_text(cell));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw Error(Errc::SchemaError, "gram csv: matrix is not square");
    }
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = rows[i][j];
  }
  return q;
}

std::string inputs_digest(const json& doc) {
  const std::string text = doc.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex = "sha256:";
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace rkhs::cli

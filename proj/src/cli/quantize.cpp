#include "rkhs/cli/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace rkhs::cli {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Scalar> values_at(const Kernel& kernel, const DiscreteMeasure& mu,
                              const Vector& alpha, const std::vector<Point>& probes) {
  std::vector<Scalar> out;
  out.reserve(probes.size());
  for (const Point& y : probes) {
    Scalar acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      acc += alpha(static_cast<Eigen::Index>(i)) * kernel(y, mu.points()[i]);
    }
    out.push_back(acc);
  }
  return out;
}

double max_abs_diff(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

}  // namespace

Scalar evaluate_target(const TargetSpec& target, const Point& x) {
  if (const auto* b = std::get_if<BergmanTarget>(&target)) return b->b(x.z());
  if (const auto* a = std::get_if<AffineTarget>(&target)) {
    const auto& c = x.coords();
    if (c.size() != a->slope.size()) {
      throw Error(Errc::DimensionMismatch, "affine target dimension differs from the sampler");
    }
    double v = a->intercept;
    for (std::size_t d = 0; d < c.size(); ++d) v += a->slope[d] * c[d];
    return v;
  }
  const auto& poly = std::get<PolynomialTarget>(target);
  const double t = x.coords().at(0);
  double v = 0.0;
  for (auto it = poly.coeffs.rbegin(); it != poly.coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

Field QuantizeStudySpec::field() const {
  return std::holds_alternative<UniformDiskSampler>(sampler) ? Field::Complex : Field::Real;
}

void validate(const QuantizeStudySpec& spec) {
  if (spec.n_values.empty()) throw Error(Errc::InvalidArgument, "N list must not be empty");
  for (std::size_t i = 0; i < spec.n_values.size(); ++i) {
    if (spec.n_values[i] == 0) throw Error(Errc::InvalidArgument, "N values must be >= 1");
    if (i > 0 && spec.n_values[i] <= spec.n_values[i - 1]) {
      throw Error(Errc::InvalidArgument, "N values must be strictly increasing");
    }
  }
  if (spec.repetitions == 0) throw Error(Errc::InvalidArgument, "repetitions must be >= 1");
  const bool disk = std::holds_alternative<UniformDiskSampler>(spec.sampler);
  if (disk != spec.kernel.disk_domain()) {
    throw Error(Errc::DomainMismatch, "sampler domain does not match the kernel domain");
  }
  if (disk != std::holds_alternative<BergmanTarget>(spec.target)) {
    throw Error(Errc::DomainMismatch, "target type does not match the sampler domain");
  }
  for (const Point& y : spec.probes) spec.kernel.check_domain(y);
}

std::vector<Point> default_probes(const DensitySampler& sampler) {
  std::vector<Point> probes;
  if (const auto* disk = std::get_if<UniformDiskSampler>(&sampler)) {
    for (int j = 0; j < 5; ++j) {
      probes.push_back(Point::disk(std::polar(0.5 * disk->radius,
                                              0.3 + 2.0 * std::numbers::pi * j / 5.0)));
    }
    return probes;
  }
  const auto& box = std::get<UniformBoxSampler>(sampler);
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    std::vector<double> x(box.lower.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = box.lower[d] + frac * (box.upper[d] - box.lower[d]);
    }
    probes.push_back(Point::euclidean(std::move(x)));
  }
  return probes;
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t n_index, std::size_t repetition) {
  return splitmix64(splitmix64(base ^ splitmix64(n_index)) + repetition);
}

QuantizeStudyResult run_quantize_study(QuantizeStudySpec spec) {
  if (spec.probes.empty()) spec.probes = default_probes(spec.sampler);
  validate(spec);

  QuantizeStudyResult result;
  result.probes = spec.probes;

  const auto* disk = std::get_if<UniformDiskSampler>(&spec.sampler);
  const auto* bergman = std::get_if<BergmanTarget>(&spec.target);
  if (disk && bergman && std::holds_alternative<SzegoKernel>(spec.kernel.variant()) &&
      spec.kernel.scale() == 1.0 && spec.cost.is_squared() && spec.p == 2.0) {
    const hardy::CoefficientFunction a = hardy::euler_lagrange_coeffs(bergman->b, disk->radius);
    std::vector<Scalar> pred;
    for (const Point& y : spec.probes) pred.push_back(a(y.z()));
    result.formula_probe_values = std::move(pred);
  }

  std::vector<Scalar> prev_mean;
  for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    const std::size_t n = spec.n_values[ni];
    const std::size_t first = result.rows.size();
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      QuantizeRow row;
      row.n = n;
      row.repetition = rep;
      row.seed = cell_seed(spec.seed, ni, rep);

      ProblemSpec ps;
      ps.kernel = spec.kernel;
      ps.measure = empirical_measure(spec.sampler, n, row.seed);
      ps.targets.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        ps.targets(static_cast<Eigen::Index>(i)) =
            evaluate_target(spec.target, ps.measure.points()[i]);
      }
      ps.cost = spec.cost;
      ps.p = spec.p;
      ps.field = spec.field();
      const Problem problem(ps);
      IterativeOptions opts = spec.solver;
      opts.record_trace = false;
      const Solution sol = solve(problem, opts);

      row.objective = sol.objective;
      row.rkhs_norm = sol.rkhs_norm;
      row.converged = sol.converged;
      row.probe_values = values_at(spec.kernel, ps.measure, sol.alpha, spec.probes);
      if (result.formula_probe_values) {
        row.formula_deviation = max_abs_diff(row.probe_values, *result.formula_probe_values);
      }
      result.rows.push_back(std::move(row));
    }

    std::vector<double> drifts;
    for (std::size_t i = first; i < result.rows.size(); ++i) {
      double d = 0.0;
      for (std::size_t k = first; k < result.rows.size(); ++k) {
        if (k != i) d = std::max(d, max_abs_diff(result.rows[i].probe_values,
                                                 result.rows[k].probe_values));
      }
      result.rows[i].probe_drift = d;
      drifts.push_back(d);
    }
    result.median_drift.push_back(median(drifts));

    std::vector<Scalar> mean(spec.probes.size(), Scalar(0.0));
    for (std::size_t i = first; i < result.rows.size(); ++i) {
      for (std::size_t j = 0; j < mean.size(); ++j) {
        mean[j] += result.rows[i].probe_values[j] / static_cast<double>(spec.repetitions);
      }
    }
    if (!prev_mean.empty()) result.cross_n_drift.push_back(max_abs_diff(mean, prev_mean));
    prev_mean = std::move(mean);
  }
  return result;
}

QuantizeStudySpec parse_quantize_spec(const json& doc) {
  ObjectReader r(doc, "");
  QuantizeStudySpec spec;

  {
    ObjectReader s(r.required("sampler"), "sampler");
    const std::string type = get_string(s.required("type"), "sampler.type");
    if (type == "disk") {
      UniformDiskSampler d;
      d.radius = get_number(s.required("r"), "sampler.r");
      if (!(d.radius > 0.0 && d.radius < 1.0)) schema_error("sampler.r", "must lie in (0, 1)");
      spec.sampler = d;
    } else if (type == "box") {
      UniformBoxSampler b;
      const json& lo = s.required("lower");
      const json& hi = s.required("upper");
      if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty()) {
        schema_error("sampler", "lower and upper must be equal-length non-empty arrays");
      }
      for (std::size_t d = 0; d < lo.size(); ++d) {
        b.lower.push_back(get_number(lo[d], "sampler.lower[" + std::to_string(d) + "]"));
        b.upper.push_back(get_number(hi[d], "sampler.upper[" + std::to_string(d) + "]"));
        if (!(b.lower[d] < b.upper[d])) schema_error("sampler", "lower must be < upper");
      }
      spec.sampler = b;
    } else {
      schema_error("sampler.type", "unknown sampler \"" + type + "\"");
    }
    s.finish();
  }
  const bool disk = std::holds_alternative<UniformDiskSampler>(spec.sampler);

  {
    ObjectReader t(r.required("target"), "target");
    const std::string type = get_string(t.required("type"), "target.type");
    if (type == "bergman") {
      if (!disk) schema_error("target.type", "bergman targets need the disk sampler");
      BergmanTarget b;
      const json& c = t.required("coeffs");
      if (!c.is_array()) schema_error("target.coeffs", "expected an array");
      for (std::size_t n = 0; n < c.size(); ++n) {
        b.b.coeffs.push_back(
            get_coefficient(c[n], "target.coeffs[" + std::to_string(n) + "]"));
      }
      spec.target = b;
    } else if (type == "affine") {
      if (disk) schema_error("target.type", "affine targets need the box sampler");
      AffineTarget a;
      if (const json* i = t.optional("intercept")) a.intercept = get_number(*i, "target.intercept");
      const json& sl = t.required("slope");
      if (!sl.is_array()) schema_error("target.slope", "expected an array");
      for (std::size_t d = 0; d < sl.size(); ++d) {
        a.slope.push_back(get_number(sl[d], "target.slope[" + std::to_string(d) + "]"));
      }
      if (a.slope.size() != std::get<UniformBoxSampler>(spec.sampler).lower.size()) {
        schema_error("target.slope", "slope dimension differs from the sampler");
      }
      spec.target = a;
    } else if (type == "polynomial") {
      if (disk) schema_error("target.type", "polynomial targets need the box sampler");
      PolynomialTarget p;
      const json& c = t.required("coeffs");
      if (!c.is_array()) schema_error("target.coeffs", "expected an array");
      for (std::size_t k = 0; k < c.size(); ++k) {
        p.coeffs.push_back(get_number(c[k], "target.coeffs[" + std::to_string(k) + "]"));
      }
      spec.target = p;
    } else {
      schema_error("target.type", "unknown target \"" + type + "\"");
    }
    t.finish();
  }

  spec.kernel = parse_kernel(r.required("kernel"), "kernel");
  if (spec.kernel.disk_domain() != disk) {
    schema_error("kernel.type", "kernel domain does not match the sampler");
  }
  spec.cost = parse_cost(r.required("cost"), "cost");
  spec.p = get_number(r.required("p"), "p");
  if (!(spec.p > 0.0)) throw Error(Errc::InvariantViolation, "p: must be positive");

  const json& ns = r.required("N");
  if (!ns.is_array() || ns.empty()) schema_error("N", "expected a non-empty array");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto v = get_integer(ns[i], "N[" + std::to_string(i) + "]");
    if (v < 1) schema_error("N[" + std::to_string(i) + "]", "must be >= 1");
    if (!spec.n_values.empty() && static_cast<std::size_t>(v) <= spec.n_values.back()) {
      schema_error("N[" + std::to_string(i) + "]", "N values must be strictly increasing");
    }
    spec.n_values.push_back(static_cast<std::size_t>(v));
  }
  if (const json* reps = r.optional("repetitions")) {
    const auto v = get_integer(*reps, "repetitions");
    if (v < 1) schema_error("repetitions", "must be >= 1");
    spec.repetitions = static_cast<std::size_t>(v);
  }
  if (const json* s = r.optional("seed")) {
    spec.seed = static_cast<std::uint64_t>(get_integer(*s, "seed"));
  }
  if (const json* pr = r.optional("probes")) {
    if (!pr->is_array()) schema_error("probes", "expected an array");
    for (std::size_t i = 0; i < pr->size(); ++i) {
      spec.probes.push_back(parse_point((*pr)[i], disk, "probes[" + std::to_string(i) + "]"));
    }
  }
  if (const json* s = r.optional("solver")) {
    ObjectReader sr(*s, "solver");
    if (const json* t = sr.optional("tol")) {
      spec.solver.tol = get_number(*t, "solver.tol");
      if (!(spec.solver.tol > 0.0)) schema_error("solver.tol", "must be positive");
    }
    if (const json* m = sr.optional("max_iter")) {
      const auto v = get_integer(*m, "solver.max_iter");
      if (v < 1) schema_error("solver.max_iter", "must be >= 1");
      spec.solver.max_iter = static_cast<std::size_t>(v);
    }
    sr.finish();
  }
  r.finish();
  return spec;
}

void write_quantize_csv(const QuantizeStudyResult& result, std::ostream& os) {
  os << "N,repetition,objective,rkhs_norm,probe_drift\n";
  os << std::setprecision(17);
  for (const QuantizeRow& row : result.rows) {
    os << row.n << ',' << row.repetition << ',' << row.objective << ',' << row.rkhs_norm << ','
       << row.probe_drift << '\n';
  }
}

json to_json(const QuantizeStudyResult& result, Field field) {
  json rows = json::array();
  for (const QuantizeRow& row : result.rows) {
    json pv = json::array();
    for (const Scalar& v : row.probe_values) pv.push_back(scalar_to_json(v, field));
    json j{{"N", row.n},
           {"repetition", row.repetition},
           {"seed", row.seed},
           {"objective", row.objective},
           {"rkhs_norm", row.rkhs_norm},
           {"probe_drift", row.probe_drift},
           {"converged", row.converged},
           {"probe_values", std::move(pv)}};
    j["formula_deviation"] = row.formula_deviation ? json(*row.formula_deviation) : json(nullptr);
    rows.push_back(std::move(j));
  }
  json probes = json::array();
  for (const Point& p : result.probes) probes.push_back(point_to_json(p));
  json out{{"probes", std::move(probes)},
           {"rows", std::move(rows)},
           {"median_drift", result.median_drift},
           {"cross_n_drift", result.cross_n_drift}};
  if (result.formula_probe_values) {
    json pv = json::array();
    for (const Scalar& v : *result.formula_probe_values) pv.push_back(scalar_to_json(v, field));
    out["formula_probe_values"] = std::move(pv);
  } else {
    out["formula_probe_values"] = nullptr;
  }
  return out;
}

}  // namespace rkhs::cli

#include "rkhs/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace rkhs::cli {

namespace {

// Thrown for failures that should exit with kExitNumerical.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_input(const std::string& path) {
  if (path.empty()) throw Error(Errc::SchemaError, "--input: no input file given");
  std::ifstream in(path);
  if (!in) throw Error(Errc::SchemaError, "--input: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, std::string("<root>: invalid JSON: ") + e.what());
  }
}

std::string base_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  return parent.empty() ? "." : parent.string();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::SchemaError, "cannot open output " + path);
  out << text;
}

void write_document(const CommandOptions& opts, const json& doc) {
  write_text(opts.output, doc.dump(2) + "\n");
}

void maybe_write_gram(const CommandOptions& opts, const Matrix& q) {
  if (opts.gram_out.empty()) return;
  std::ostringstream os;
  write_gram_csv(q, os);
  write_text(opts.gram_out, os.str());
}

void report_error(std::ostream& err, const std::string& code, const std::string& message) {
  json e{{"version", kSchemaVersion}, {"error", {{"code", code}, {"message", message}}}};
  err << e.dump() << std::endl;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::DegenerateSpan:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NumericalFailure& e) {
    report_error(err, "NotConverged", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    report_error(err, "SchemaError", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return kExitNumerical;
  }
}

json input_with_flags(json input, const CommandOptions& opts) {
  json flags = json::object();
  if (opts.seed) flags["seed"] = *opts.seed;
  if (opts.tol) flags["tol"] = *opts.tol;
  if (opts.strict) flags["strict"] = true;
  return json{{"input", std::move(input)}, {"flags", std::move(flags)}};
}

}  // namespace

json result_document(const std::string& command, const json& input, json result,
                     const Diagnostics& diag) {
  return json{{"version", kSchemaVersion},
              {"command", command},
              {"inputs_digest", inputs_digest(input)},
              {"result", std::move(result)},
              {"diagnostics", diag.warnings}};
}

HardyInput parse_hardy_input(const json& doc) {
  ObjectReader r(doc, "");
  HardyInput in;
  const json& b = r.required("b");
  if (!b.is_array()) schema_error("b", "expected an array");
  for (std::size_t n = 0; n < b.size(); ++n) {
    const std::string path = "b[" + std::to_string(n) + "]";
    in.b.coeffs.push_back(get_coefficient(b[n], path));
  }
  in.b.space = hardy::Space::Bergman;
  in.r = get_number(r.required("r"), "r");
  if (const json* m = r.optional("M")) {
    const auto v = get_integer(*m, "M");
    if (v < 1 || static_cast<std::size_t>(v) < in.b.coeffs.size()) {
      schema_error("M", "must be >= max(1, length of b)");
    }
    in.options.truncation = static_cast<int>(v);
  }
  if (const json* q = r.optional("quadrature")) {
    ObjectReader qr(*q, "quadrature");
    if (const json* v = qr.optional("n_r")) {
      in.options.quad.n_r = static_cast<int>(get_integer(*v, "quadrature.n_r"));
    }
    if (const json* v = qr.optional("n_theta")) {
      in.options.quad.n_theta = static_cast<int>(get_integer(*v, "quadrature.n_theta"));
    }
    qr.finish();
  }
  if (const json* v = r.optional("node_basis_limit")) {
    in.options.node_basis_limit = static_cast<int>(get_integer(*v, "node_basis_limit"));
  }
  r.finish();
  return in;
}

int run_interpolate(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const json input = read_input(opts.input);
    const ProblemFile file = parse_problem_file(input, base_dir(opts.input));
    if (!file.targets) schema_error("targets", "missing required key");
    Diagnostics diag;

    GramMatrix q;
    if (file.explicit_gram) {
      q = GramMatrix::from_matrix(*file.explicit_gram);
    } else {
      try {
        q = gram(*file.kernel, file.points);
      } catch (const Error& e) {
        throw Error(Errc::InvariantViolation, std::string(to_string(e.code())) + ": " + e.what());
      }
    }
    const InterpolationResult res = min_norm_interpolate(q, *file.targets, file.rank_tol);
    if (res.rank < q.size()) {
      diag.warn("Gram matrix is rank deficient (rank " + std::to_string(res.rank) + " of " +
                std::to_string(q.size()) + "); pseudoinverse cutoff applied");
    }
    maybe_write_gram(opts, q.entries());
    write_document(opts, result_document("interpolate", input_with_flags(input, opts),
                                         to_json(res, file.field), diag));
    return kExitOk;
  });
}

int run_solve(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const json input = read_input(opts.input);
    const ProblemFile file = parse_problem_file(input, base_dir(opts.input));
    Diagnostics diag;
    const ProblemSpec spec = to_problem_spec(file, &diag);
    SolverConfig cfg = file.solver;
    if (opts.seed) cfg.options.seed = *opts.seed;
    if (opts.tol) cfg.options.tol = *opts.tol;

    const Problem problem(spec);
    Solution sol;
    switch (cfg.method) {
      case SolverConfig::Method::Auto: sol = solve(problem, cfg.options); break;
      case SolverConfig::Method::ClosedForm: sol = solve_closed_form(problem); break;
      case SolverConfig::Method::Iterative: sol = solve_iterative(problem, cfg.options); break;
    }
    if (!sol.converged) {
      diag.warn("NotConverged: iterative solver reached max_iter");
      if (opts.strict) throw NumericalFailure("solver did not converge within max_iter");
    }
    maybe_write_gram(opts, problem.gram());
    json result = to_json(sol, spec.field);
    result["support_size"] = problem.size();
    write_document(opts, result_document("solve", input_with_flags(input, opts),
                                         std::move(result), diag));
    return kExitOk;
  });
}

int run_frame_bounds(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const json input = read_input(opts.input);
    const ProblemFile file = parse_problem_file(input, base_dir(opts.input));
    Diagnostics diag;
    const std::uint64_t seed = opts.seed.value_or(file.frame.seed);

    Matrix q;
    RealVector weights;
    std::optional<DiscreteMeasure> mu;
    try {
      if (file.explicit_gram) {
        q = *file.explicit_gram;
        const auto n = static_cast<std::size_t>(q.rows());
        std::vector<double> w = file.weights.value_or(std::vector<double>(n, 1.0));
        double mass = 0.0;
        for (double v : w) {
          if (!(v > 0.0)) throw Error(Errc::NonPositiveWeight, "weights must be positive");
          mass += v;
        }
        weights = Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(n)) / mass;
      } else {
        mu = file.weights ? make_discrete_measure(file.points, *file.weights, &diag)
                          : make_uniform_measure(file.points);
        q = gram(*file.kernel, mu->points()).entries();
        weights = mu->weight_vector();
      }
    } catch (const Error& e) {
      throw Error(Errc::InvariantViolation, std::string(to_string(e.code())) + ": " + e.what());
    }

    NormEquivalenceReport rep;
    if (mu) {
      rep = norm_equivalence_report(*file.kernel, *mu, file.frame.p, file.frame.n_samples, seed,
                                    file.frame.bins);
    } else {
      // Explicit Gram input: assemble the report from the matrix-level routines.
      const FrameBounds sampled =
          frame_ratio_sample(q, weights, file.frame.p, file.frame.n_samples, seed);
      rep.p = file.frame.p;
      rep.lower = sampled.lower;
      rep.upper = sampled.upper;
      rep.c1 = std::pow(sampled.lower, 1.0 / rep.p);
      rep.c2 = std::pow(sampled.upper, 1.0 / rep.p);
      rep.rank = sampled.rank;
      rep.support = sampled.support;
      rep.full_rank = rep.rank == rep.support;
      rep.note = "bounds restricted to the span of the supplied Gram matrix";
      if (rep.p == 2.0) rep.exact = frame_bounds_p2(q, weights);
      rep.ratios = sampled.ratios;
      const std::size_t bins = file.frame.bins;
      const double width = rep.upper > rep.lower ? (rep.upper - rep.lower) / bins : 0.0;
      rep.histogram.resize(bins);
      for (std::size_t k = 0; k < bins; ++k) {
        rep.histogram[k].lo = rep.lower + width * k;
        rep.histogram[k].hi = k + 1 == bins ? rep.upper : rep.lower + width * (k + 1);
      }
      for (double v : rep.ratios) {
        const std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - rep.lower) / width) : 0;
        rep.histogram[std::min(k, bins - 1)].count++;
      }
    }
    if (!rep.full_rank) diag.warn(rep.note);

    if (!opts.histogram.empty()) {
      std::ostringstream os;
      os << std::setprecision(17) << "bin_lo,bin_hi,count\n";
      for (const HistogramBin& b : rep.histogram) {
        os << b.lo << ',' << b.hi << ',' << b.count << '\n';
      }
      write_text(opts.histogram, os.str());
    }
    maybe_write_gram(opts, q);
    json result = to_json(rep);
    result["seed"] = seed;
    write_document(opts, result_document("frame-bounds", input_with_flags(input, opts),
                                         std::move(result), diag));
    return kExitOk;
  });
}

int run_hardy_demo(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const json input = read_input(opts.input);
    const HardyInput in = parse_hardy_input(input);
    Diagnostics diag;
    const hardy::HardyDemoReport rep = hardy::hardy_demo(in.b, in.r, in.options);
    for (const std::string& w : rep.warnings) diag.warn(w);

    if (!opts.csv.empty()) {
      std::ostringstream os;
      os << std::setprecision(17) << "n,a_formula,a_computed,deviation\n";
      for (std::size_t n = 0; n < rep.computed.size(); ++n) {
        os << n << ',' << format_complex_text(rep.formula[n]) << ','
           << format_complex_text(rep.computed[n]) << ',' << rep.deviation[n] << '\n';
      }
      write_text(opts.csv, os.str());
    }
    write_document(opts, result_document("hardy-demo", input_with_flags(input, opts),
                                         to_json(rep), diag));
    return kExitOk;
  });
}

int run_quantize(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const json input = read_input(opts.input);
    QuantizeStudySpec spec = parse_quantize_spec(input);
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.tol) spec.solver.tol = *opts.tol;
    const Field field = spec.field();
    Diagnostics diag;
    const QuantizeStudyResult res = run_quantize_study(std::move(spec));
    bool all_converged = true;
    for (const QuantizeRow& row : res.rows) all_converged = all_converged && row.converged;
    if (!all_converged) {
      diag.warn("NotConverged: at least one study cell hit max_iter");
      if (opts.strict) throw NumericalFailure("study solve did not converge within max_iter");
    }
    if (!opts.csv.empty()) {
      std::ostringstream os;
      write_quantize_csv(res, os);
      write_text(opts.csv, os.str());
    }
    write_document(opts, result_document("quantize", input_with_flags(input, opts),
                                         to_json(res, field), diag));
    return kExitOk;
  });
}

}  // namespace rkhs::cli

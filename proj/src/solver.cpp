#include "rkhs/solver.hpp"

#include "rkhs/interpolate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rkhs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct Evaluated {
  Vector alpha;
  Vector f;  // Q alpha
  double s = 0.0;  // alpha^H Q alpha, clamped
  double data = 0.0;
  double reg = 0.0;
  double J() const { return data + reg; }
};

// Width of the smoothing applied to kinks; 0 means the exact objective.
// Smoothed terms: |r|^q -> (|r|^2 + w^2)^{q/2} for q < 2, the eps-insensitive
// loss evaluated at sqrt(|r|^2 + w^2) through a softplus-type hinge, and
// s^{p/2} -> (s + w^2)^{p/2} for p < 2. Each stays convex.
struct Smoothing {
  double width = 0.0;
};

double hinge(double x, double w) { return 0.5 * (x + std::sqrt(x * x + w * w)); }

double cost_value(const CostFunction& cost, Scalar a, Scalar b, Smoothing sm) {
  if (sm.width == 0.0) return cost.value(a, b);
  const double t2 = std::norm(a - b) + sm.width * sm.width;
  if (const auto* c = std::get_if<PowerCost>(&cost.variant()); c && c->q < 2.0) {
    return std::pow(t2, 0.5 * c->q);
  }
  if (const auto* c = std::get_if<EpsInsensitiveCost>(&cost.variant())) {
    return hinge(std::sqrt(t2) - c->eps, sm.width);
  }
  return cost.value(a, b);
}

Scalar cost_derivative(const CostFunction& cost, Scalar a, Scalar b, Smoothing sm, bool* ok) {
  if (sm.width == 0.0) return cost.derivative(a, b, ok);
  const Scalar r = a - b;
  const double t2 = std::norm(r) + sm.width * sm.width;
  if (const auto* c = std::get_if<PowerCost>(&cost.variant()); c && c->q < 2.0) {
    return c->q * std::pow(t2, 0.5 * c->q - 1.0) * r;
  }
  if (const auto* c = std::get_if<EpsInsensitiveCost>(&cost.variant())) {
    const double ts = std::sqrt(t2);
    const double x = ts - c->eps;
    return 0.5 * (1.0 + x / std::sqrt(x * x + sm.width * sm.width)) * r / ts;
  }
  return cost.derivative(a, b, ok);
}

double reg_base(double s, double p, Smoothing sm) {
  return p < 2.0 ? s + sm.width * sm.width : s;
}

double data_term(const Problem& problem, const Vector& f, Smoothing sm = {}) {
  const auto& cost = problem.spec().cost;
  const auto& g = problem.spec().targets;
  const RealVector& mu = problem.weights();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) acc += mu(i) * cost_value(cost, f(i), g(i), sm);
  return acc;
}

Evaluated evaluate(const Problem& problem, Vector alpha, Smoothing sm = {}) {
  Evaluated e;
  e.f = problem.gram() * alpha;
  e.s = std::max(0.0, alpha.dot(e.f).real());
  e.data = data_term(problem, e.f, sm);
  const double p = problem.spec().p;
  e.reg = sm.width == 0.0 ? std::pow(std::sqrt(e.s), p)
                          : std::pow(reg_base(e.s, p, sm), 0.5 * p);
  e.alpha = std::move(alpha);
  return e;
}

Vector direction(const Problem& problem, const Vector& alpha, const Vector& f, double s,
                 Diagnostics* diag, Smoothing sm = {}) {
  const auto& spec = problem.spec();
  const RealVector& mu = problem.weights();
  Vector d(alpha.size());
  bool smooth = true;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    bool ok = true;
    d(i) = mu(i) * cost_derivative(spec.cost, f(i), spec.targets(i), sm, &ok);
    smooth = smooth && ok;
  }
  const double base = sm.width == 0.0 ? s : reg_base(s, spec.p, sm);
  if (base > 0.0) {
    d += (spec.p * std::pow(base, 0.5 * spec.p - 1.0)) * alpha;
  } else if (spec.p <= 1.0) {
    smooth = false;  // |f|^p has a kink at f = 0; subgradient element 0
  }
  if (!smooth) warn(diag, "NonSmoothPoint: subgradient element returned");
  return d;
}

bool has_kinks(const ProblemSpec& spec) {
  if (spec.p == 1.0) return true;
  if (const auto* c = std::get_if<PowerCost>(&spec.cost.variant())) return c->q == 1.0;
  return std::holds_alternative<EpsInsensitiveCost>(spec.cost.variant());
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// CostFunction

CostFunction::CostFunction(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const SquaredCost&) {},
                 [](const PowerCost& c) {
                   if (!(c.q >= 1.0) || !std::isfinite(c.q))
                     throw Error(Errc::InvalidArgument, "power cost needs q >= 1");
                 },
                 [](const HuberCost& c) {
                   if (!(c.delta > 0.0) || !std::isfinite(c.delta))
                     throw Error(Errc::InvalidArgument, "huber cost needs delta > 0");
                 },
                 [](const EpsInsensitiveCost& c) {
                   if (!(c.eps >= 0.0) || !std::isfinite(c.eps))
                     throw Error(Errc::InvalidArgument, "eps-insensitive cost needs eps >= 0");
                 },
             },
             v_);
}

std::string CostFunction::name() const {
  return std::visit(overloaded{
                        [](const SquaredCost&) { return std::string("squared"); },
                        [](const PowerCost& c) { return "power(q=" + format_double(c.q) + ")"; },
                        [](const HuberCost& c) {
                          return "huber(delta=" + format_double(c.delta) + ")";
                        },
                        [](const EpsInsensitiveCost& c) {
                          return "eps_insensitive(eps=" + format_double(c.eps) + ")";
                        },
                    },
                    v_);
}

double CostFunction::value(Scalar a, Scalar b) const {
  const Scalar r = a - b;
  const double t = std::abs(r);
  return std::visit(overloaded{
                        [&](const SquaredCost&) { return std::norm(r); },
                        [&](const PowerCost& c) { return std::pow(t, c.q); },
                        [&](const HuberCost& c) {
                          return t <= c.delta ? 0.5 * t * t : c.delta * (t - 0.5 * c.delta);
                        },
                        [&](const EpsInsensitiveCost& c) { return std::max(0.0, t - c.eps); },
                    },
                    v_);
}

Scalar CostFunction::derivative(Scalar a, Scalar b, bool* smooth) const {
  const Scalar r = a - b;
  const double t = std::abs(r);
  bool ok = true;
  const Scalar d = std::visit(
      overloaded{
          [&](const SquaredCost&) -> Scalar { return 2.0 * r; },
          [&](const PowerCost& c) -> Scalar {
            if (t == 0.0) {
              ok = c.q > 1.0;
              return 0.0;
            }
            return c.q * std::pow(t, c.q - 2.0) * r;
          },
          [&](const HuberCost& c) -> Scalar { return t <= c.delta ? r : c.delta * r / t; },
          [&](const EpsInsensitiveCost& c) -> Scalar {
            if (t > c.eps) return r / t;
            if (t == c.eps) ok = false;
            return 0.0;
          },
      },
      v_);
  if (smooth != nullptr) *smooth = ok;
  return d;
}

// ---------------------------------------------------------------------------
// Problem

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
  const auto n = static_cast<Eigen::Index>(spec_.measure.size());
  if (n == 0) throw Error(Errc::EmptySupport, "problem measure has empty support");
  if (spec_.targets.size() != n) {
    throw Error(Errc::DimensionMismatch, "one target per support point is required");
  }
  if (!(spec_.p > 0.0) || !std::isfinite(spec_.p)) {
    throw Error(Errc::UnsupportedExponent, "regularization exponent must be in (0, inf)");
  }
  if (spec_.field == Field::Real) {
    if (spec_.kernel.disk_domain()) {
      throw Error(Errc::InvalidArgument, spec_.kernel.name() + " requires the complex field");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (spec_.targets(i).imag() != 0.0) {
        throw Error(Errc::InvalidArgument, "real problem with a complex target value");
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(spec_.targets(i).real()) || !std::isfinite(spec_.targets(i).imag())) {
      throw Error(Errc::InvalidArgument, "non-finite target value");
    }
  }
  q_ = rkhs::gram(spec_.kernel, spec_.measure.points());
  mu_ = spec_.measure.weight_vector();
}

// ---------------------------------------------------------------------------
// Objective and gradients

ObjectiveParts objective_parts(const Problem& problem, const Vector& alpha) {
  if (alpha.size() != problem.size()) {
    throw Error(Errc::DimensionMismatch, "coefficient vector does not match support size");
  }
  const Evaluated e = evaluate(problem, alpha);
  return {e.data, e.reg, std::sqrt(e.s)};
}

double objective(const Problem& problem, const Vector& alpha) {
  return objective_parts(problem, alpha).total();
}

Vector rkhs_gradient(const Problem& problem, const Vector& alpha, Diagnostics* diag) {
  if (alpha.size() != problem.size()) {
    throw Error(Errc::DimensionMismatch, "coefficient vector does not match support size");
  }
  const Vector f = problem.gram() * alpha;
  const double s = std::max(0.0, alpha.dot(f).real());
  return direction(problem, alpha, f, s, diag);
}

Vector gradient(const Problem& problem, const Vector& alpha, Diagnostics* diag) {
  return problem.gram() * rkhs_gradient(problem, alpha, diag);
}

const char* to_string(SolveMethod m) {
  return m == SolveMethod::ClosedForm ? "closed_form" : "iterative";
}

// ---------------------------------------------------------------------------
// Solvers

Solution solve_closed_form(const Problem& problem) {
  const auto& spec = problem.spec();
  if (!spec.cost.is_squared() || spec.p != 2.0) {
    throw Error(Errc::UnsupportedCombination,
                "closed form requires squared cost and p = 2 (got " + spec.cost.name() +
                    ", p = " + format_double(spec.p) + ")");
  }
  // W^{-1} + Q is Hermitian positive definite since mu_i > 0 and Q is PSD.
  Matrix a = problem.gram();
  a.diagonal() += problem.weights().cwiseInverse().cast<Scalar>();
  Eigen::LLT<Matrix> llt(a);
  Solution sol;
  if (llt.info() == Eigen::Success) {
    sol.alpha = llt.solve(spec.targets);
  } else {
    sol.alpha = Eigen::PartialPivLU<Matrix>(a).solve(spec.targets);
    sol.notes.push_back("Cholesky failed; LU fallback used");
  }
  if (spec.field == Field::Real) sol.alpha = sol.alpha.real().cast<Scalar>();

  const Evaluated e = evaluate(problem, sol.alpha);
  sol.data_term = e.data;
  sol.reg_term = e.reg;
  sol.objective = e.J();
  sol.rkhs_norm = std::sqrt(e.s);
  sol.converged = true;
  sol.method = SolveMethod::ClosedForm;
  return sol;
}

namespace {

struct DescentState {
  Evaluated cur;
  double t = 1.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool nonsmooth_noted = false;
};

// Line-search descent along the RKHS gradient of the (possibly smoothed)
// objective. Returns when the stopping rule fires, the line search stalls, or
// the iteration budget is spent. `trace` receives accepted objective values.
void descend(const Problem& problem, DescentState& st, Smoothing sm, double tol,
             std::size_t max_iter, StepPolicy policy, std::vector<double>* trace,
             std::vector<std::string>& notes) {
  constexpr double kArmijo = 1e-4;
  constexpr double kCurvature = 0.9;
  constexpr double kRoundoff = 1e-12;
  constexpr int kMaxHalvings = 80;
  st.converged = false;
  const std::size_t start = st.iterations;

  while (st.iterations < max_iter) {
    const std::size_t iter = st.iterations - start;
    Diagnostics local;
    const Vector d = direction(problem, st.cur.alpha, st.cur.f, st.cur.s, &local, sm);
    if (!local.warnings.empty() && !st.nonsmooth_noted) {
      notes.push_back("non-smooth point visited; subgradient steps used");
      st.nonsmooth_noted = true;
    }
    if (d.norm() == 0.0) {
      st.converged = true;
      return;
    }
    const double descent = std::max(0.0, d.dot(problem.gram() * d).real());

    bool accepted = false;
    Evaluated next;
    if (policy == StepPolicy::Backtracking) {
      double trial = std::min(2.0 * st.t, 1e8);
      for (int h = 0; h < kMaxHalvings; ++h, trial *= 0.5) {
        next = evaluate(problem, st.cur.alpha - trial * d, sm);
        const double change = st.cur.J() - next.J();
        if (std::abs(change) > kRoundoff * std::max(1.0, std::abs(st.cur.J()))) {
          if (change >= kArmijo * trial * descent) {
            accepted = true;
            st.t = trial;
            break;
          }
          continue;
        }
        // The change in J is below its rounding level, so the Armijo test
        // cannot be decided; use the approximate Wolfe conditions on the
        // directional derivative instead (Hager-Zhang), keeping J monotone.
        if (change < 0.0) continue;
        Diagnostics ignored;
        const Vector d_next = direction(problem, next.alpha, next.f, next.s, &ignored, sm);
        const double slope = d_next.dot(problem.gram() * d).real();
        if (slope >= -(1.0 - 2.0 * kArmijo) * descent && slope <= kCurvature * descent) {
          accepted = true;
          st.t = trial;
          break;
        }
      }
    }
    if (!accepted) {
      // Diminishing step, accepted only when the objective does not increase.
      double trial = (policy == StepPolicy::Diminishing ? 1.0 : st.t) /
                     std::sqrt(static_cast<double>(iter) + 1.0);
      for (int h = 0; h < kMaxHalvings; ++h, trial *= 0.5) {
        next = evaluate(problem, st.cur.alpha - trial * d, sm);
        if (next.J() <= st.cur.J() && (next.alpha - st.cur.alpha).norm() > 0.0) {
          accepted = true;
          if (policy == StepPolicy::Backtracking) st.t = std::max(trial, 1e-12);
          break;
        }
      }
    }
    if (!accepted) {
      if (sm.width == 0.0) notes.push_back("line search stalled at the numerical floor");
      st.converged = true;
      return;
    }

    const double decrease = st.cur.J() - next.J();
    const double step = (next.alpha - st.cur.alpha).norm();
    st.cur = std::move(next);
    ++st.iterations;
    if (trace != nullptr) trace->push_back(st.cur.J());
    if (decrease <= tol * std::max(1.0, std::abs(st.cur.J())) &&
        step <= tol * std::max(1.0, st.cur.alpha.norm())) {
      st.converged = true;
      return;
    }
  }
}

}  // namespace

Solution solve_iterative(const Problem& problem, const IterativeOptions& opts) {
  const auto& spec = problem.spec();
  if (!(spec.p >= 1.0)) {
    throw Error(Errc::UnsupportedExponent,
                "iterative solver requires p >= 1 (got " + format_double(spec.p) + ")");
  }
  if (!(opts.tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");

  const Eigen::Index n = problem.size();
  Vector alpha0 = Vector::Zero(n);
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = spec.field == Field::Complex ? normal(rng) : 0.0;
      alpha0(i) = Scalar(re, im);
    }
  }

  Solution sol;
  sol.method = SolveMethod::Iterative;
  DescentState st;
  st.cur = evaluate(problem, std::move(alpha0));

  if (has_kinks(spec)) {
    // Continuation over smoothed objectives, each warm-started from the last.
    // A stage result is kept only if it improves the exact objective.
    const double scale = std::max(1.0, spec.targets.cwiseAbs().maxCoeff());
    DescentState smooth_st = st;
    for (double width = 0.1 * scale; width >= 1e-9 * scale; width *= 0.1) {
      const Smoothing sm{width};
      smooth_st.cur = evaluate(problem, smooth_st.cur.alpha, sm);
      smooth_st.t = 1.0;
      descend(problem, smooth_st, sm, std::max(opts.tol, 1e-3 * width), opts.max_iter,
              opts.step_policy, nullptr, sol.notes);
      if (smooth_st.iterations >= opts.max_iter) break;
    }
    Evaluated warm = evaluate(problem, smooth_st.cur.alpha);
    if (warm.J() <= st.cur.J()) {
      st.cur = std::move(warm);
      sol.notes.push_back("smoothing continuation used for non-differentiable terms");
    }
    st.iterations = smooth_st.iterations;
  }

  if (opts.record_trace) sol.objective_trace.push_back(st.cur.J());
  descend(problem, st, Smoothing{}, opts.tol, opts.max_iter, opts.step_policy,
          opts.record_trace ? &sol.objective_trace : nullptr, sol.notes);

  sol.converged = st.converged;
  sol.iterations = st.iterations;
  if (!sol.converged) sol.notes.push_back("NotConverged: max_iter reached");
  sol.alpha = std::move(st.cur.alpha);
  sol.data_term = st.cur.data;
  sol.reg_term = st.cur.reg;
  sol.objective = st.cur.data + st.cur.reg;
  sol.rkhs_norm = std::sqrt(st.cur.s);
  return sol;
}

Solution solve(const Problem& problem, const IterativeOptions& opts) {
  if (problem.spec().cost.is_squared() && problem.spec().p == 2.0) {
    return solve_closed_form(problem);
  }
  return solve_iterative(problem, opts);
}

Vector solve_weighted_ridge(const Matrix& features, const RealVector& weights,
                            const Vector& targets, const Matrix& basis_gram) {
  if (features.rows() != weights.size() || features.rows() != targets.size() ||
      basis_gram.rows() != features.cols() || basis_gram.cols() != features.cols()) {
    throw Error(Errc::DimensionMismatch, "inconsistent ridge system dimensions");
  }
  const Matrix weighted = weights.cast<Scalar>().asDiagonal() * features;
  Matrix a = features.adjoint() * weighted + basis_gram;
  a = 0.5 * (a + a.adjoint());
  const Vector rhs = weighted.adjoint() * targets;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  return pseudo_solve(a, rhs);
}

// ---------------------------------------------------------------------------
// Representer certificate

RepresenterCertificate representer_certificate(const Problem& problem, const Solution& sol,
                                               const std::vector<Point>& probe_points) {
  const auto& spec = problem.spec();
  const auto& support = spec.measure.points();
  const Eigen::Index n = problem.size();
  if (sol.alpha.size() != n) {
    throw Error(Errc::DimensionMismatch, "solution does not match the problem support");
  }

  RepresenterCertificate report;
  report.min_increase = std::numeric_limits<double>::infinity();
  const HermitianSpectrum s = spectrum(problem.gram());

  for (const Point& y : probe_points) {
    spec.kernel.check_domain(y);
    for (const Point& x : support) {
      if (x == y) {
        throw Error(Errc::DuplicatePoint, "probe " + y.to_string() + " lies in supp(mu)");
      }
    }

    // Extended Gram over supp(mu) + {y}.
    Matrix q_ext(n + 1, n + 1);
    q_ext.topLeftCorner(n, n) = problem.gram();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar v = spec.kernel(support[i], y);
      q_ext(i, n) = v;
      q_ext(n, i) = std::conj(v);
    }
    q_ext(n, n) = spec.kernel(y, y).real();

    // h = k_y - P_span k_y has coefficients (-beta, 1) with beta = Q^+ q_y.
    const Vector beta = pseudo_solve(s, q_ext.col(n).head(n));
    Vector h(n + 1);
    h.head(n) = -beta;
    h(n) = 1.0;

    Vector base(n + 1);
    base.head(n) = sol.alpha;
    base(n) = 0.0;

    auto objective_ext = [&](const Vector& a) {
      const Vector f = q_ext * a;
      double data = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        data += problem.weights()(i) * spec.cost.value(f(i), spec.targets(i));
      }
      const double sq = std::max(0.0, a.dot(f).real());
      return data + std::pow(std::sqrt(sq), spec.p);
    };

    ProbeCertificate pc;
    pc.probe = y;
    pc.orthogonal_norm_sq = rkhs_norm_sq(h, q_ext);
    pc.min_increase = std::numeric_limits<double>::infinity();
    const double j0 = objective_ext(base);
    for (double step : report.steps) {
      for (double sign : {1.0, -1.0}) {
        const double change = objective_ext(base + (sign * step) * h) - j0;
        pc.min_increase = std::min(pc.min_increase, change);
      }
    }
    report.min_increase = std::min(report.min_increase, pc.min_increase);
    report.probes.push_back(std::move(pc));
  }
  if (probe_points.empty()) report.min_increase = 0.0;
  report.passed = report.min_increase >= -1e-9;
  return report;
}

}  // namespace rkhs

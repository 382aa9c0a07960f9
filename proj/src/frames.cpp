#include "rkhs/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rkhs {

namespace {

// Columns V_r Lambda_r^{1/2}: maps whitened coordinates beta (|f| = |beta|)
// to values f(x_i) = (Q alpha)_i.
struct WhitenedSpan {
  Matrix values_map;
  Eigen::Index rank = 0;
};

WhitenedSpan whiten(const Matrix& q) {
  const HermitianSpectrum s = spectrum(q);
  const auto idx = s.range_indices(kFrameRankTol);
  WhitenedSpan w;
  w.rank = static_cast<Eigen::Index>(idx.size());
  w.values_map.resize(q.rows(), w.rank);
  for (Eigen::Index k = 0; k < w.rank; ++k) {
    w.values_map.col(k) = s.vectors.col(idx[k]) * std::sqrt(s.values(idx[k]));
  }
  return w;
}

bool is_real_matrix(const Matrix& q) { return q.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

const char* to_string(FrameMethod m) {
  return m == FrameMethod::EigenP2 ? "eigen_p2" : "sampled";
}

FrameBounds frame_bounds_p2(const Matrix& q, const RealVector& weights) {
  if (q.rows() != weights.size()) {
    throw Error(Errc::DimensionMismatch, "weights do not match Gram size");
  }
  const WhitenedSpan w = whiten(q);
  if (w.rank == 0) throw Error(Errc::DegenerateSpan, "Gram matrix has rank 0");

  // |f|^2_{L2(mu)} = beta^H M beta with M = L^H W L, |f|^2_H = |beta|^2.
  Matrix m = w.values_map.adjoint() * weights.cast<Scalar>().asDiagonal() * w.values_map;
  m = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);

  FrameBounds b;
  b.p = 2.0;
  b.method = FrameMethod::EigenP2;
  b.lower = std::max(0.0, es.eigenvalues()(0));
  b.upper = std::max(b.lower, es.eigenvalues()(w.rank - 1));
  b.rank = w.rank;
  b.support = q.rows();
  return b;
}

FrameBounds frame_bounds_p2(const Kernel& kernel, const DiscreteMeasure& mu) {
  return frame_bounds_p2(gram(kernel, mu.points()).entries(), mu.weight_vector());
}

FrameBounds frame_ratio_sample(const Matrix& q, const RealVector& weights, double p,
                               std::size_t n_samples, std::uint64_t seed) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(Errc::UnsupportedExponent, "frame sampling requires p >= 1");
  }
  if (n_samples == 0) throw Error(Errc::InvalidArgument, "n_samples must be >= 1");
  if (q.rows() != weights.size()) {
    throw Error(Errc::DimensionMismatch, "weights do not match Gram size");
  }
  const WhitenedSpan w = whiten(q);
  if (w.rank == 0) throw Error(Errc::DegenerateSpan, "Gram matrix has rank 0");
  const bool complex_span = !is_real_matrix(q);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  FrameBounds b;
  b.p = p;
  b.method = FrameMethod::Sampled;
  b.n_samples = n_samples;
  b.seed = seed;
  b.rank = w.rank;
  b.support = q.rows();
  b.lower = std::numeric_limits<double>::infinity();
  b.upper = 0.0;
  b.ratios.reserve(n_samples);

  Vector beta(w.rank);
  for (std::size_t s = 0; s < n_samples; ++s) {
    double nrm = 0.0;
    do {
      for (Eigen::Index k = 0; k < w.rank; ++k) {
        const double re = normal(rng);
        const double im = complex_span ? normal(rng) : 0.0;
        beta(k) = Scalar(re, im);
      }
      nrm = beta.norm();
    } while (nrm == 0.0);
    beta /= nrm;
    const Vector f = w.values_map * beta;
    double ratio = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) ratio += weights(i) * std::pow(std::abs(f(i)), p);
    b.ratios.push_back(ratio);
    b.lower = std::min(b.lower, ratio);
    b.upper = std::max(b.upper, ratio);
  }
  return b;
}

FrameBounds frame_ratio_sample(const Kernel& kernel, const DiscreteMeasure& mu, double p,
                               std::size_t n_samples, std::uint64_t seed) {
  return frame_ratio_sample(gram(kernel, mu.points()).entries(), mu.weight_vector(), p,
                            n_samples, seed);
}

NormEquivalenceReport norm_equivalence_report(const Kernel& kernel, const DiscreteMeasure& mu,
                                              double p, std::size_t n_samples,
                                              std::uint64_t seed, std::size_t bins) {
  const Matrix q = gram(kernel, mu.points()).entries();
  const RealVector weights = mu.weight_vector();
  FrameBounds sampled = frame_ratio_sample(q, weights, p, n_samples, seed);

  NormEquivalenceReport r;
  r.p = p;
  r.lower = sampled.lower;
  r.upper = sampled.upper;
  r.c1 = std::pow(sampled.lower, 1.0 / p);
  r.c2 = std::pow(sampled.upper, 1.0 / p);
  r.rank = sampled.rank;
  r.support = sampled.support;
  r.full_rank = sampled.rank == sampled.support;
  r.note = "bounds restricted to span{k_x : x in supp(mu)}";
  if (!r.full_rank) {
    r.note += "; Gram rank " + std::to_string(r.rank) + " < support size " +
              std::to_string(r.support) + ", bounds hold on the " + std::to_string(r.rank) +
              "-dimensional span only";
  }
  if (p == 2.0) r.exact = frame_bounds_p2(q, weights);

  if (bins > 0) {
    const double lo = sampled.lower;
    const double hi = sampled.upper;
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 0.0;
    r.histogram.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      r.histogram[k].lo = lo + width * static_cast<double>(k);
      r.histogram[k].hi = k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1);
    }
    for (double v : sampled.ratios) {
      std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
      r.histogram[std::min(k, bins - 1)].count++;
    }
  }
  r.ratios = std::move(sampled.ratios);
  return r;
}

}  // namespace rkhs

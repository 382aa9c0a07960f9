#pragma once

// Continuous p-frame bounds of the feature map x -> k_x with respect to a
// finitely supported measure, restricted to span{k_x : x in supp(mu)}:
//
//   A |f|^p <= sum_i mu_i |f(x_i)|^p <= B |f|^p.

#include "rkhs/kernels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rkhs {

enum class FrameMethod { EigenP2, Sampled };
const char* to_string(FrameMethod m);

struct FrameBounds {
  double lower = 0.0;  ///< A
  double upper = 0.0;  ///< B
  double p = 2.0;
  FrameMethod method = FrameMethod::EigenP2;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  Eigen::Index rank = 0;       ///< numerical rank of Q
  Eigen::Index support = 0;    ///< |supp(mu)|
  std::vector<double> ratios;  ///< sampled ratios in draw order (Sampled only)
};

inline constexpr double kFrameRankTol = 1e-10;

/// Exact p = 2 bounds: extreme eigenvalues of the pencil (Q W Q, Q) on
/// range(Q), computed by whitening in the eigenbasis of Q. Throws
/// DegenerateSpan when rank(Q) = 0.
FrameBounds frame_bounds_p2(const Kernel& kernel, const DiscreteMeasure& mu);
FrameBounds frame_bounds_p2(const Matrix& q, const RealVector& weights);

/// Inner estimates of A and B from n_samples unit-norm elements of the span.
/// Samples live in range(Q), so null directions never appear. The first n
/// draws of a seed are the same for every n_samples >= n.
FrameBounds frame_ratio_sample(const Kernel& kernel, const DiscreteMeasure& mu, double p,
                               std::size_t n_samples, std::uint64_t seed);
FrameBounds frame_ratio_sample(const Matrix& q, const RealVector& weights, double p,
                               std::size_t n_samples, std::uint64_t seed);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct NormEquivalenceReport {
  double p = 2.0;
  double lower = 0.0;  ///< A (sampled; exact for p = 2 is in `exact`)
  double upper = 0.0;  ///< B
  double c1 = 0.0;     ///< A^{1/p}
  double c2 = 0.0;     ///< B^{1/p}
  bool full_rank = false;
  Eigen::Index rank = 0;
  Eigen::Index support = 0;
  std::string note;
  std::optional<FrameBounds> exact;  ///< eigen bounds when p = 2
  std::vector<double> ratios;
  std::vector<HistogramBin> histogram;
};

NormEquivalenceReport norm_equivalence_report(const Kernel& kernel, const DiscreteMeasure& mu,
                                              double p, std::size_t n_samples,
                                              std::uint64_t seed, std::size_t bins = 20);

}  // namespace rkhs

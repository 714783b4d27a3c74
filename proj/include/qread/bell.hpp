#pragma once

#include <cstdint>
#include <vector>

#include "qread/bounds.hpp"

// Sub-optimal receiver: a continuous-variable Bell measurement on each
// reflected-signal/idler pair (balanced beam splitter + two homodynes),
// pooled into a chi-square test.
//
// Under bit u the M copies yield 2M i.i.d. zero-mean Gaussian outcomes
// (q-, p+ per copy) of variance v_u, with v1 < v0. The statistic
// X = sum z^2 / v1 is chi2_{2M} under bit 1; the receiver decides bit 1 iff
// X <= x_phi, where x_phi is the upper-phi point of chi2_{2M}. The type-I
// error (under bit 1) is phi by construction and the type-II error is
// chi2_cdf(x_phi v1 / v0, 2M).
namespace qread::bell {

struct ReceiverConfig {
  std::int64_t M = 1;
  double phi = 0.05;
  std::int64_t trials = 100'000;
  std::uint64_t seed = 0;
};

inline constexpr std::int64_t kMinTrials = 10'000;

struct EprVariancePair {
  double v0 = 1.0;
  double v1 = 1.0;
};

/// Variance of q- = (q_R - q_I)/sqrt2 (equal to that of p+ = (p_R + p_I)/sqrt2)
/// for one TMSV pair with n_s signal photons reflected with reflectivity r,
/// including the memory's decoherence.
double epr_variance(double r, double n_s, const MemorySpec& memory);

EprVariancePair epr_variances(double n_s, const MemorySpec& memory);

struct ErrorProb {
  double p_err = 0.5;
  double type1 = 0.0;
  double type2 = 1.0;
  /// False when v0 == v1: the test cannot separate the hypotheses.
  bool discriminating = true;
};

/// Equal-prior error probability of the chi-square receiver.
ErrorProb bell_error_prob(std::int64_t M, double phi, double v0, double v1);

struct MonteCarloEstimate {
  double p_err = 0.5;
  double std_err = 0.0;
  /// False when fewer than kMinTrials trials were requested.
  bool enough_trials = true;
};

/// Empirical error rate from `trials` simulated readouts per hypothesis.
/// Deterministic in `seed`.
MonteCarloEstimate mc_error_prob(std::int64_t M, double phi, double v0, double v1,
                                 std::int64_t trials, std::uint64_t seed);

struct SurfacePoint {
  std::int64_t M = 1;
  double phi = 0.0;
  double p_err = 0.5;
  double G = 0.0;
};

struct BellOptimum {
  double G_best = 0.0;
  std::int64_t M_best = 1;
  double phi_best = 0.0;
  double p_err_best = 0.5;
  double C = 0.5;
  /// Row-major over (M_grid, phi_grid).
  std::vector<SurfacePoint> surface;
};

/// Maximizes H(C) - H(P_err) over the grids at fixed total energy N.
BellOptimum optimize_bell_gain(const MemorySpec& memory, double N,
                               const std::vector<std::int64_t>& M_grid,
                               const std::vector<double>& phi_grid);

/// SplitMix64 step; used to derive independent per-point seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace qread::bell

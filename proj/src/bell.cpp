#include "qread/bell.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "qread/chi2.hpp"

namespace qread::bell {

namespace {

void check_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("significance level must lie in (0,1)");
}

void check_variances(double v0, double v1) {
  if (!(v0 > 0.0) || !(v1 > 0.0) || !std::isfinite(v0) || !std::isfinite(v1)) {
    throw DomainError("variances must be positive");
  }
}

int degrees_of_freedom(std::int64_t M) {
  if (M < 1 || M > (1 << 29)) throw DomainError("number of copies out of range");
  return static_cast<int>(2 * M);
}

// Number of wrong decisions among `trials` readouts whose outcomes have
// variance `v`; `bit_one` is the true hypothesis.
std::int64_t count_errors(std::int64_t M, double v, double v1, double threshold, bool bit_one,
                          std::int64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = v / v1;
  std::int64_t errors = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < 2 * M; ++i) {
      const double z = normal(rng);
      sum += z * z;
    }
    const bool decide_one = scale * sum <= threshold;
    if (decide_one != bit_one) ++errors;
  }
  return errors;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double epr_variance(double r, double n_s, const MemorySpec& memory) {
  const Matrix v = epr_output_state(n_s, r, memory).cov();
  const double var_q_minus = 0.5 * (v(0, 0) + v(2, 2) - 2.0 * v(0, 2));
  const double var_p_plus = 0.5 * (v(1, 1) + v(3, 3) + 2.0 * v(1, 3));
  return 0.5 * (var_q_minus + var_p_plus);
}

EprVariancePair epr_variances(double n_s, const MemorySpec& memory) {
  const MemorySpec mem = memory.normalized();
  return {epr_variance(mem.r0, n_s, mem), epr_variance(mem.r1, n_s, mem)};
}

ErrorProb bell_error_prob(std::int64_t M, double phi, double v0, double v1) {
  check_phi(phi);
  check_variances(v0, v1);
  const int dof = degrees_of_freedom(M);
  if (v0 < v1) std::swap(v0, v1);
  ErrorProb out;
  out.discriminating = v0 != v1;
  const double threshold = chi2_isf(phi, dof);
  out.type1 = phi;
  out.type2 = chi2_cdf(threshold * v1 / v0, dof);
  out.p_err = std::min(0.5, 0.5 * (out.type1 + out.type2));
  return out;
}

MonteCarloEstimate mc_error_prob(std::int64_t M, double phi, double v0, double v1,
                                 std::int64_t trials, std::uint64_t seed) {
  check_phi(phi);
  check_variances(v0, v1);
  const int dof = degrees_of_freedom(M);
  if (trials < 1) throw DomainError("Monte Carlo needs at least one trial");
  if (v0 < v1) std::swap(v0, v1);
  const double threshold = chi2_isf(phi, dof);
  const auto n = static_cast<double>(trials);
  const double e1 = count_errors(M, v1, v1, threshold, true, trials, derive_seed(seed, 1)) / n;
  const double e0 = count_errors(M, v0, v1, threshold, false, trials, derive_seed(seed, 0)) / n;
  MonteCarloEstimate out;
  out.p_err = 0.5 * (e0 + e1);
  out.std_err = 0.5 * std::sqrt((e0 * (1.0 - e0) + e1 * (1.0 - e1)) / n);
  out.enough_trials = trials >= kMinTrials;
  return out;
}

BellOptimum optimize_bell_gain(const MemorySpec& memory, double N,
                               const std::vector<std::int64_t>& M_grid,
                               const std::vector<double>& phi_grid) {
  if (M_grid.empty() || phi_grid.empty()) throw DomainError("empty optimization grid");
  if (!(N > 0.0)) throw DomainError("signal energy N must be > 0");
  const MemorySpec mem = memory.normalized();
  BellOptimum out;
  out.C = classical_bound_for(N, mem);
  const double h_c = binary_entropy(out.C);
  bool first = true;
  for (const std::int64_t M : M_grid) {
    const EprVariancePair v = epr_variances(N / static_cast<double>(M), mem);
    for (const double phi : phi_grid) {
      SurfacePoint pt{M, phi, 0.5, 0.0};
      pt.p_err = mem.degenerate() ? 0.5 : bell_error_prob(M, phi, v.v0, v.v1).p_err;
      pt.G = h_c - binary_entropy(pt.p_err);
      if (first || pt.G > out.G_best) {
        out.G_best = pt.G;
        out.M_best = M;
        out.phi_best = phi;
        out.p_err_best = pt.p_err;
        first = false;
      }
      out.surface.push_back(pt);
    }
  }
  return out;
}

}  // namespace qread::bell

#include "qread/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qread {

namespace {

void check_energy(double N) {
  if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("signal energy N must be >= 0");
}

// (1 - sqrt(1 - y)) / 2 for y = exp(log_y), free of cancellation at both
// ends of (0, 1].
double helstrom_from_log_overlap(double log_y) {
  const double y = std::exp(log_y);
  const double one_minus_y = -std::expm1(log_y);
  return y / (2.0 * (1.0 + std::sqrt(std::max(0.0, one_minus_y))));
}

}  // namespace

MemorySpec MemorySpec::normalized() const {
  for (double r : {r0, r1}) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivities must lie in [0,1]");
  }
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("nbar must be >= 0");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("eps must be >= 0");
  if (m_star && *m_star < 1) throw DomainError("m_star must be >= 1");
  MemorySpec out = *this;
  if (r0 > r1) {
    std::swap(out.r0, out.r1);
    out.swapped = !swapped;
  }
  return out;
}

void TransmitterSpec::validate() const {
  if (M < 1) throw DomainError("bandwidth M must be >= 1");
  if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("signal energy N must be > 0");
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double classical_bound(double N, double r0, double r1) {
  check_energy(N);
  for (double r : {r0, r1}) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivities must lie in [0,1]");
  }
  const double d = std::sqrt(r1) - std::sqrt(r0);
  return helstrom_from_log_overlap(-N * d * d);
}

BosonicChannel signal_channel(double r, const MemorySpec& memory) {
  const BosonicChannel noise = add_noise(memory.eps);
  return compose(noise, compose(thermal_loss(r, memory.nbar), noise));
}

BosonicChannel idler_channel(const MemorySpec& memory) { return add_noise(2.0 * memory.eps); }

double classical_bound_decoherent(std::int64_t m_c, double N, const MemorySpec& memory) {
  if (m_c < 1) throw DomainError("classical bandwidth must be >= 1");
  check_energy(N);
  const MemorySpec mem = memory.normalized();
  if (mem.degenerate()) return 0.5;
  const auto probe = GaussianState::coherent(std::sqrt(N / static_cast<double>(m_c)));
  const auto out0 = apply_channel(probe, 0, signal_channel(mem.r0, mem));
  const auto out1 = apply_channel(probe, 0, signal_channel(mem.r1, mem));
  const double fidelity = std::min(1.0, gaussian_fidelity_1mode(out0, out1));
  return helstrom_from_log_overlap(static_cast<double>(m_c) * std::log(fidelity));
}

double classical_bound_for(double N, const MemorySpec& memory) {
  const MemorySpec mem = memory.normalized();
  if (mem.noiseless()) return classical_bound(N, mem.r0, mem.r1);
  if (!mem.m_star) {
    throw DomainError("a noisy memory needs a finite classical bandwidth cap m_star");
  }
  return classical_bound_decoherent(*mem.m_star, N, mem);
}

GaussianState epr_output_state(double n_s, double r, const MemorySpec& memory) {
  const auto signal = apply_channel(tmsv_state(n_s), 0, signal_channel(r, memory));
  return apply_channel(signal, 1, idler_channel(memory));
}

EprChernoff epr_qcb(const TransmitterSpec& tx, const MemorySpec& memory) {
  tx.validate();
  const MemorySpec mem = memory.normalized();
  if (mem.degenerate()) return {0.5, 0.5};
  const auto theta0 = epr_output_state(tx.n_s(), mem.r0, mem);
  const auto theta1 = epr_output_state(tx.n_s(), mem.r1, mem);
  const ChernoffResult res = qcb(theta0, theta1);
  const double q_min = std::min(1.0, res.q_min);
  // Swapping the hypotheses maps t to 1 - t.
  const double t_star = mem.swapped ? 1.0 - res.t_star : res.t_star;
  return {0.5 * std::exp(static_cast<double>(tx.M) * std::log(q_min)), t_star};
}

double threshold_energy(double r0, double r1) {
  for (double r : {r0, r1}) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivities must lie in [0,1]");
  }
  if (r0 == r1) throw DomainError("threshold energy is undefined for r0 == r1");
  const double d = std::sqrt(1.0 - r0) - std::sqrt(1.0 - r1);
  return 2.0 * std::log(2.0) / (d * d);
}

double info_gain(const TransmitterSpec& tx, const MemorySpec& memory) {
  return binary_entropy(classical_bound_for(tx.N, memory)) - binary_entropy(epr_qcb(tx, memory).Q);
}

BoundReport bound_report(const TransmitterSpec& tx, const MemorySpec& memory) {
  BoundReport rep;
  rep.C = classical_bound_for(tx.N, memory);
  const EprChernoff q = epr_qcb(tx, memory);
  rep.Q = q.Q;
  rep.t_star = q.t_star;
  rep.G = binary_entropy(rep.C) - binary_entropy(rep.Q);
  rep.conclusive = rep.Q < rep.C;
  return rep;
}

MinBandwidth find_min_bandwidth(double N, const MemorySpec& memory, const SearchLimits& limits) {
  if (!(N > 0.0)) throw DomainError("signal energy N must be > 0");
  const MemorySpec mem = memory.normalized();
  MinBandwidth out;
  out.C = classical_bound_for(N, mem);
  if (mem.degenerate()) return out;

  auto q_at = [&](std::int64_t m) { return epr_qcb({m, N}, mem).Q; };

  // Doubling phase: lo is the last bandwidth without violation (0 = none).
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double q_hi = 0.5;
  for (std::int64_t m = 1;; m = std::min(2 * m, limits.max_bandwidth)) {
    const double q = q_at(m);
    if (q < out.C) {
      hi = m;
      q_hi = q;
      break;
    }
    lo = m;
    out.Q = q;
    if (m >= limits.max_bandwidth) return out;
  }

  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double q = q_at(mid);
    if (q < out.C) {
      hi = mid;
      q_hi = q;
    } else {
      lo = mid;
    }
  }
  out.m_bar = hi;
  out.Q = q_hi;
  return out;
}

double qcb_infinite_bandwidth(double N, const MemorySpec& memory, const SearchLimits& limits) {
  if (!(N > 0.0)) throw DomainError("signal energy N must be > 0");
  const MemorySpec mem = memory.normalized();
  if (mem.degenerate()) return 0.5;
  if (!mem.noiseless()) {
    throw DomainError("infinite-bandwidth limit requires a noiseless memory");
  }

  // E(M) = log(2 Q(M)) = -kappa N + b/M + O(1/M^2); Richardson-combine
  // consecutive doublings to cancel the 1/M term.
  auto log_2q = [&](std::int64_t m) {
    return std::log(2.0 * epr_qcb({m, N}, mem).Q);
  };
  std::int64_t m = 1;
  double e_prev = log_2q(m);
  double extrapolated_prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < limits.max_doublings; ++k) {
    m *= 2;
    const double e = log_2q(m);
    const double extrapolated = 2.0 * e - e_prev;
    if (std::isfinite(extrapolated_prev)) {
      // |dQ|/Q = |d log Q|
      if (std::abs(std::expm1(extrapolated - extrapolated_prev)) < limits.rel_tol) {
        return 0.5 * std::exp(std::min(0.0, extrapolated));
      }
    }
    extrapolated_prev = extrapolated;
    e_prev = e;
  }
  throw NumericError("infinite-bandwidth limit did not converge after " +
                     std::to_string(limits.max_doublings) + " doublings");
}

double ecc_overhead(double p_err) {
  if (!(p_err >= 0.0 && p_err <= 1.0)) throw DomainError("error probability must lie in [0,1]");
  if (p_err >= 0.5) return std::numeric_limits<double>::infinity();
  const double capacity = 1.0 - binary_entropy(p_err);
  if (capacity <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / capacity;
}

}  // namespace qread

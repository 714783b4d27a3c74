#pragma once

#include <cstdint>
#include <optional>

#include "qread/gaussian.hpp"

namespace qread {

/// Binary memory cell: bit u is stored as reflectivity r_u. `nbar` is the
/// thermal background entering the cell, `eps` the reader's internal added
/// noise (vacuum units). `m_star` caps the bandwidth of classical
/// competitors; std::nullopt means unbounded, which is only meaningful for a
/// noiseless memory.
struct MemorySpec {
  double r0 = 0.0;
  double r1 = 1.0;
  double nbar = 0.0;
  double eps = 0.0;
  std::optional<std::int64_t> m_star;
  /// Set by normalized() when r0 and r1 were exchanged.
  bool swapped = false;

  /// Validated copy with r0 <= r1.
  MemorySpec normalized() const;
  bool noiseless() const { return nbar == 0.0 && eps == 0.0; }
  bool degenerate() const { return r0 == r1; }
};

/// EPR transmitter: M TMSV pairs carrying N signal photons in total.
struct TransmitterSpec {
  std::int64_t M = 1;
  double N = 1.0;

  double n_s() const { return N / static_cast<double>(M); }
  void validate() const;
};

struct BoundReport {
  double C = 0.5;
  double Q = 0.5;
  double G = 0.0;
  double t_star = 0.5;
  std::optional<std::int64_t> m_bar;
  /// Q < C. Otherwise the two one-sided bounds prove nothing.
  bool conclusive = false;
};

/// Caps for the bandwidth searches.
struct SearchLimits {
  std::int64_t max_bandwidth = 1'000'000;
  int max_doublings = 60;
  double rel_tol = 1e-8;
};

double binary_entropy(double p);

/// Lower bound on the error of every classical transmitter with N photons.
double classical_bound(double N, double r0, double r1);

/// Fidelity-based classical bound for classical bandwidth m_c on a noisy
/// memory. Reduces to classical_bound when nbar = eps = 0.
double classical_bound_decoherent(std::int64_t m_c, double N, const MemorySpec& memory);

/// Classical bound under the memory's m_star policy: the noiseless bound, or
/// the decoherent bound at m_c = m_star (C is non-increasing in m_c).
double classical_bound_for(double N, const MemorySpec& memory);

/// N(eps) o E(r, nbar) o N(eps), acting on each signal mode.
BosonicChannel signal_channel(double r, const MemorySpec& memory);
/// N(2 eps), acting on each idler mode.
BosonicChannel idler_channel(const MemorySpec& memory);

/// Signal/idler output of one TMSV pair with n_s photons per signal mode
/// after reflection from a cell of reflectivity r.
GaussianState epr_output_state(double n_s, double r, const MemorySpec& memory);

struct EprChernoff {
  double Q = 0.5;
  double t_star = 0.5;
};

/// Quantum Chernoff upper bound on the EPR transmitter's error.
EprChernoff epr_qcb(const TransmitterSpec& tx, const MemorySpec& memory);

/// Energy above which some EPR transmitter beats every classical one.
double threshold_energy(double r0, double r1);

/// H(C) - H(Q); may be negative in the inconclusive region.
double info_gain(const TransmitterSpec& tx, const MemorySpec& memory);

BoundReport bound_report(const TransmitterSpec& tx, const MemorySpec& memory);

struct MinBandwidth {
  /// Smallest bandwidth found with Q < C; empty means inconclusive within
  /// the search cap, not nonexistence.
  std::optional<std::int64_t> m_bar;
  double Q = 0.5;
  double C = 0.5;
};

MinBandwidth find_min_bandwidth(double N, const MemorySpec& memory, const SearchLimits& limits = {});

/// M -> infinity limit of epr_qcb at fixed N.
double qcb_infinite_bandwidth(double N, const MemorySpec& memory, const SearchLimits& limits = {});

/// Shannon-capacity overhead 1 / (1 - H(p_err)) in cells per reliable bit;
/// +infinity when the capacity vanishes.
double ecc_overhead(double p_err);

}  // namespace qread

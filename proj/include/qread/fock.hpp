#pragma once

#include <Eigen/Dense>

#include "qread/chernoff_search.hpp"
#include "qread/errors.hpp"

// Truncated Fock-space brute force. Independent of the covariance-matrix
// formulas in gaussian.hpp and used to cross-check them.
namespace qread::fock {

using Matrix = Eigen::MatrixXd;

inline constexpr int kDefaultNMax = 40;
inline constexpr int kMaxNMax = 200;
inline constexpr double kTargetTruncLoss = 1e-12;
inline constexpr double kAcceptedTruncLoss = 1e-10;

/// Real density matrix on one or two truncated modes. Two-mode basis index
/// is n0 * (n_max + 1) + n1. `trunc_loss` is the probability weight that
/// fell outside the truncation, so trace == 1 - trunc_loss.
struct FockDensity {
  int n_max = 0;
  int n_modes = 1;
  Matrix matrix;
  double trunc_loss = 0.0;

  int dim() const { return static_cast<int>(matrix.rows()); }
  double trace() const { return matrix.trace(); }
};

/// TMSV |xi><xi| with sinh^2 xi = n_s, mode 0 = signal, mode 1 = idler.
/// n_max starts at `n_max` and grows geometrically until the discarded
/// weight is below kTargetTruncLoss; throws NumericError past kMaxNMax.
FockDensity tmsv_fock(double n_s, int n_max = kDefaultNMax);

/// Coherent state |alpha> with real alpha.
FockDensity coherent_fock(double alpha, int n_max = kDefaultNMax);

FockDensity thermal_fock(double nbar, int n_max = kDefaultNMax);

/// Pure-loss (attenuator) channel with transmissivity r on `mode`.
FockDensity apply_pure_loss_fock(const FockDensity& rho, int mode, double r);

double mean_photon_number(const FockDensity& rho, int mode);

/// rho^p through a symmetric eigendecomposition. Eigenvalues below 1e-14 are
/// treated as zero; eigenvalues below -1e-10 raise InvalidStateError.
Matrix frac_power(const FockDensity& rho, double p);

/// Tr(rho0^t rho1^(1-t)).
double overlap_t_fock(const FockDensity& rho0, const FockDensity& rho1, double t);

/// Tr(rho0 rho1).
double overlap_fock(const FockDensity& rho0, const FockDensity& rho1);

ChernoffResult qcb_fock(const FockDensity& rho0, const FockDensity& rho1);

/// Squared Uhlmann fidelity (Tr sqrt(sqrt(rho0) rho1 sqrt(rho0)))^2.
double fidelity_fock(const FockDensity& rho0, const FockDensity& rho1);

}  // namespace qread::fock

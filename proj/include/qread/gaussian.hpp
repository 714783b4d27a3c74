#pragma once

#include <Eigen/Dense>

#include <vector>

#include "qread/chernoff_search.hpp"
#include "qread/errors.hpp"

namespace qread {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Gaussian state of n bosonic modes in quadrature order (q1,p1,q2,p2,...).
///
/// Units: the vacuum has covariance matrix equal to the identity, a thermal
/// state with mean photon number nbar has (2 nbar + 1) I, and a coherent
/// state |alpha> has mean (2 Re alpha, 2 Im alpha).
///
/// The constructor checks symmetry and the uncertainty principle (all
/// symplectic eigenvalues >= 1 - 1e-9) and throws InvalidStateError
/// otherwise. Instances are immutable.
class GaussianState {
 public:
  GaussianState(Vector mean, Matrix cov);

  static GaussianState vacuum(int n_modes = 1);
  static GaussianState thermal(double nbar);
  static GaussianState coherent(double alpha_re, double alpha_im = 0.0);

  int n_modes() const { return static_cast<int>(mean_.size() / 2); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  /// 2x2 covariance block between modes i and j.
  Matrix block(int i, int j) const { return cov_.block<2, 2>(2 * i, 2 * j); }

 private:
  Vector mean_;
  Matrix cov_;
};

/// One-mode phase-insensitive Gaussian channel: mean -> scale * mean,
/// V -> scale^2 V + added_noise I.
struct BosonicChannel {
  double scale = 1.0;
  double added_noise = 0.0;
};

BosonicChannel pure_loss(double r);
BosonicChannel thermal_loss(double r, double nbar);
BosonicChannel add_noise(double eps);

/// Channel that applies `first`, then `second`.
BosonicChannel compose(const BosonicChannel& second, const BosonicChannel& first);

/// Symplectic eigenvalues, one per mode, in descending order.
struct SymplecticSpectrum {
  std::vector<double> eigenvalues;

  bool is_pure(double tol = 1e-9) const;
};

/// Williamson normal form V = S diag(nu_1,nu_1,nu_2,nu_2,...) S^T with S
/// symplectic. `nu` is descending and mode k of the normal form occupies
/// columns 2k, 2k+1 of S.
struct WilliamsonForm {
  std::vector<double> nu;
  Matrix symplectic;
};

/// Symplectic form for `n_modes` modes, blocks [[0,1],[-1,0]].
Matrix symplectic_form(int n_modes);

GaussianState tmsv_state(double n_s);

GaussianState apply_channel(const GaussianState& state, int mode, const BosonicChannel& ch);

SymplecticSpectrum symplectic_eigenvalues(const GaussianState& state);
WilliamsonForm williamson(const Matrix& cov);

/// Tolerance below which nu - 1 is treated as exact purity. Scales with the
/// squared norm of the covariance because rounding in the entries of a
/// strongly squeezed V perturbs its symplectic spectrum by ~eps * |V|^2.
double purity_tolerance(const Matrix& cov);

/// Tr(rho_a rho_b).
double gaussian_overlap(const GaussianState& a, const GaussianState& b);

/// Tr(rho_a^t rho_b^(1-t)) for t in (0,1). t is clamped to
/// [kChernoffTMin, 1 - kChernoffTMin] before evaluation.
double qcb_overlap_t(const GaussianState& a, const GaussianState& b, double t);

/// Minimum of qcb_overlap_t over t.
ChernoffResult qcb(const GaussianState& a, const GaussianState& b);

/// Squared Uhlmann fidelity between two single-mode Gaussian states.
double gaussian_fidelity_1mode(const GaussianState& a, const GaussianState& b);

}  // namespace qread

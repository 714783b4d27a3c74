#include "qread/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qread {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPhysicalTol = 1e-9;
constexpr double kChannelTol = 1e-12;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_symmetric(const Matrix& cov) {
  const double scale = std::max(1.0, max_abs(cov));
  if (max_abs(cov - cov.transpose()) > kSymmetryTol * scale) {
    throw InvalidStateError("covariance matrix is not symmetric");
  }
}

void check_channel(const BosonicChannel& ch) {
  if (!(ch.scale >= 0.0) || !(ch.added_noise >= 0.0) || !std::isfinite(ch.scale) ||
      !std::isfinite(ch.added_noise)) {
    throw DomainError("channel parameters must be finite and non-negative");
  }
  if (ch.added_noise < std::abs(1.0 - ch.scale * ch.scale) - kChannelTol) {
    throw DomainError("channel is not completely positive");
  }
}

void check_reflectivity(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivity must lie in [0,1]");
}

// Scalar factor G_p(nu) and transformed eigenvalue Lambda_p(nu) of rho^p for
// a thermal mode with symplectic eigenvalue nu.
struct PowerFactors {
  double scale;
  double nu_p;
};

PowerFactors power_factors(double nu, double p, double pure_tol) {
  if (nu - 1.0 <= pure_tol) return {1.0, 1.0};
  // (nu+1)^p -+ (nu-1)^p written as (nu+1)^p (1 -+ x^p), x = (nu-1)/(nu+1)
  const double log_x = std::log1p(-2.0 / (nu + 1.0));
  const double plus = std::pow(nu + 1.0, p);
  const double diff = -plus * std::expm1(p * log_x);
  const double sum = plus * (1.0 + std::exp(p * log_x));
  return {std::pow(2.0, p) / diff, sum / diff};
}

// Tr(rho_a rho_b) from raw moments.
double overlap_raw(const Vector& mean_a, const Matrix& cov_a, const Vector& mean_b,
                   const Matrix& cov_b) {
  const Matrix sum = cov_a + cov_b;
  Eigen::LLT<Matrix> llt(sum);
  if (llt.info() != Eigen::Success) throw NumericError("V_a + V_b is not positive definite");
  const Matrix& l = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < sum.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const Vector delta = mean_a - mean_b;
  const double quad = delta.dot(llt.solve(delta));
  const double n = static_cast<double>(sum.rows() / 2);
  return std::exp(n * std::log(2.0) - 0.5 * log_det - 0.5 * quad);
}

Matrix rebuild(const WilliamsonForm& w, const std::vector<double>& nu_p) {
  const auto dim = w.symplectic.rows();
  Vector diag(dim);
  for (std::size_t k = 0; k < nu_p.size(); ++k) diag(2 * k) = diag(2 * k + 1) = nu_p[k];
  Matrix out = w.symplectic * diag.asDiagonal() * w.symplectic.transpose();
  return 0.5 * (out + out.transpose());
}

// t -> Tr(rho_a^t rho_b^(1-t)). The Williamson forms do not depend on t and
// are computed once.
class PowerOverlap {
 public:
  PowerOverlap(const GaussianState& a, const GaussianState& b)
      : a_(a), b_(b), wa_(williamson(a.cov())), wb_(williamson(b.cov())),
        tol_a_(purity_tolerance(a.cov())), tol_b_(purity_tolerance(b.cov())) {
    if (a.n_modes() != b.n_modes()) throw DomainError("states have different mode counts");
    for (std::size_t k = 0; k < wa_.nu.size(); ++k) {
      if (wa_.nu[k] < 1.0 - kPhysicalTol || wb_.nu[k] < 1.0 - kPhysicalTol) {
        throw InvalidStateError("non-physical symplectic spectrum");
      }
    }
  }

  double operator()(double t) const {
    double prefactor = 1.0;
    std::vector<double> nu_a(wa_.nu.size());
    std::vector<double> nu_b(wb_.nu.size());
    for (std::size_t k = 0; k < wa_.nu.size(); ++k) {
      const auto fa = power_factors(wa_.nu[k], t, tol_a_);
      const auto fb = power_factors(wb_.nu[k], 1.0 - t, tol_b_);
      prefactor *= fa.scale * fb.scale;
      nu_a[k] = fa.nu_p;
      nu_b[k] = fb.nu_p;
    }
    return prefactor * overlap_raw(a_.mean(), rebuild(wa_, nu_a), b_.mean(), rebuild(wb_, nu_b));
  }

 private:
  const GaussianState& a_;
  const GaussianState& b_;
  WilliamsonForm wa_;
  WilliamsonForm wb_;
  double tol_a_;
  double tol_b_;
};

}  // namespace

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() == 0 || cov_.rows() % 2 != 0 ||
      mean_.size() != cov_.rows()) {
    throw InvalidStateError("mean/covariance dimensions must be 2n and 2n x 2n");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) throw InvalidStateError("non-finite moments");
  check_symmetric(cov_);
  cov_ = 0.5 * (cov_ + cov_.transpose());
  const auto w = williamson(cov_);
  if (w.nu.back() < 1.0 - kPhysicalTol) {
    throw InvalidStateError("symplectic eigenvalue below 1: violates the uncertainty principle");
  }
}

GaussianState GaussianState::vacuum(int n_modes) {
  if (n_modes < 1) throw DomainError("n_modes must be positive");
  return {Vector::Zero(2 * n_modes), Matrix::Identity(2 * n_modes, 2 * n_modes)};
}

GaussianState GaussianState::thermal(double nbar) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("nbar must be >= 0");
  return {Vector::Zero(2), (2.0 * nbar + 1.0) * Matrix::Identity(2, 2)};
}

GaussianState GaussianState::coherent(double alpha_re, double alpha_im) {
  Vector mean(2);
  mean << 2.0 * alpha_re, 2.0 * alpha_im;
  return {mean, Matrix::Identity(2, 2)};
}

BosonicChannel pure_loss(double r) {
  check_reflectivity(r);
  return {std::sqrt(r), 1.0 - r};
}

BosonicChannel thermal_loss(double r, double nbar) {
  check_reflectivity(r);
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("nbar must be >= 0");
  return {std::sqrt(r), (1.0 - r) * (2.0 * nbar + 1.0)};
}

BosonicChannel add_noise(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("added noise must be >= 0");
  return {1.0, eps};
}

BosonicChannel compose(const BosonicChannel& second, const BosonicChannel& first) {
  return {second.scale * first.scale,
          second.scale * second.scale * first.added_noise + second.added_noise};
}

bool SymplecticSpectrum::is_pure(double tol) const {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(),
                     [tol](double nu) { return std::abs(nu - 1.0) <= tol; });
}

Matrix symplectic_form(int n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

GaussianState tmsv_state(double n_s) {
  if (!(n_s >= 0.0) || !std::isfinite(n_s)) throw DomainError("n_s must be >= 0");
  const double mu = 2.0 * n_s + 1.0;
  const double c = 2.0 * std::sqrt(n_s * (n_s + 1.0));
  Matrix cov(4, 4);
  cov << mu, 0, c, 0,
         0, mu, 0, -c,
         c, 0, mu, 0,
         0, -c, 0, mu;
  return {Vector::Zero(4), cov};
}

GaussianState apply_channel(const GaussianState& state, int mode, const BosonicChannel& ch) {
  if (mode < 0 || mode >= state.n_modes()) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range");
  }
  check_channel(ch);
  Vector mean = state.mean();
  Matrix cov = state.cov();
  const Eigen::Index i = 2 * mode;
  mean.segment<2>(i) *= ch.scale;
  cov.middleRows<2>(i) *= ch.scale;
  cov.middleCols<2>(i) *= ch.scale;
  cov(i, i) += ch.added_noise;
  cov(i + 1, i + 1) += ch.added_noise;
  return {mean, cov};
}

WilliamsonForm williamson(const Matrix& cov) {
  const auto dim = cov.rows();
  const int n = static_cast<int>(dim / 2);

  Eigen::SelfAdjointEigenSolver<Matrix> cov_es(cov);
  if (cov_es.info() != Eigen::Success) throw NumericError("eigensolver failed on covariance");
  const Vector w = cov_es.eigenvalues();
  if (w.minCoeff() <= 0.0) throw InvalidStateError("covariance matrix is not positive definite");
  const Matrix& u = cov_es.eigenvectors();
  const Matrix sqrt_v = u * w.cwiseSqrt().asDiagonal() * u.transpose();
  const Matrix inv_sqrt_v = u * w.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();

  // A = V^{-1/2} Omega V^{-1/2} is antisymmetric with eigenvalues +-i/nu_k;
  // K = A^T A carries 1/nu_k^2 twice per mode.
  Matrix a = inv_sqrt_v * symplectic_form(n) * inv_sqrt_v;
  a = 0.5 * (a - a.transpose());
  const Matrix k = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> k_es(0.5 * (k + k.transpose()));
  if (k_es.info() != Eigen::Success) throw NumericError("eigensolver failed in Williamson form");
  const Vector kappa = k_es.eigenvalues();  // ascending, so nu descending
  const Matrix& e = k_es.eigenvectors();

  // Orthogonal O with O^T A O = diag(nu_k^{-1} [[0,1],[-1,0]]), built pair by
  // pair: u from an eigenvector of K, v = -nu A u.
  Matrix o(dim, dim);
  WilliamsonForm out;
  int cols = 0;
  for (Eigen::Index j = 0; j < dim && cols < dim; ++j) {
    Vector r = e.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < cols; ++c) r -= o.col(c).dot(r) * o.col(c);
    }
    const double norm = r.norm();
    if (norm < 0.5) continue;
    const double nu = 1.0 / std::sqrt(kappa(j));
    const Vector uj = r / norm;
    Vector vj = -nu * (a * uj);
    vj -= vj.dot(uj) * uj;
    vj.normalize();
    o.col(cols++) = uj;
    o.col(cols++) = vj;
    out.nu.push_back(nu);
  }
  if (cols != dim) throw NumericError("Williamson pairing failed");

  Vector d(dim);
  for (int m = 0; m < n; ++m) d(2 * m) = d(2 * m + 1) = 1.0 / std::sqrt(out.nu[m]);
  out.symplectic = sqrt_v * o * d.asDiagonal();
  return out;
}

SymplecticSpectrum symplectic_eigenvalues(const GaussianState& state) {
  return {williamson(state.cov()).nu};
}

double purity_tolerance(const Matrix& cov) {
  const double norm = cov.cwiseAbs().rowwise().sum().maxCoeff();
  return std::max(1e-12, 1e-14 * norm * norm);
}

double gaussian_overlap(const GaussianState& a, const GaussianState& b) {
  if (a.n_modes() != b.n_modes()) throw DomainError("states have different mode counts");
  return overlap_raw(a.mean(), a.cov(), b.mean(), b.cov());
}

double qcb_overlap_t(const GaussianState& a, const GaussianState& b, double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0,1)");
  return PowerOverlap(a, b)(clamp_chernoff_t(t));
}

ChernoffResult qcb(const GaussianState& a, const GaussianState& b) {
  const PowerOverlap q_t(a, b);
  return minimize_over_t(std::cref(q_t));
}

double gaussian_fidelity_1mode(const GaussianState& a, const GaussianState& b) {
  if (a.n_modes() != 1 || b.n_modes() != 1) throw DomainError("single-mode states required");
  const Eigen::Matrix2d va = a.cov();
  const Eigen::Matrix2d vb = b.cov();
  const Eigen::Matrix2d sum = va + vb;
  const double det_sum = sum.determinant();
  const double mixed = std::max(0.0, va.determinant() - 1.0) * std::max(0.0, vb.determinant() - 1.0);
  // 2 / (sqrt(det_sum + mixed) - sqrt(mixed)), rationalized
  const double prefactor = 2.0 * (std::sqrt(det_sum + mixed) + std::sqrt(mixed)) / det_sum;
  const Eigen::Vector2d delta = a.mean() - b.mean();
  const double quad = delta.dot(sum.inverse() * delta);
  return prefactor * std::exp(-0.5 * quad);
}

}  // namespace qread

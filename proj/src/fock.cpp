#include "qread/fock.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qread::fock {

namespace {

using Vector = Eigen::VectorXd;

constexpr double kZeroEigenvalue = 1e-14;
constexpr double kNegativeEigenvalue = -1e-10;

// Smallest n_max >= start (grown by factors of 1.5) whose discarded weight is
// below kTargetTruncLoss.
int grow_n_max(int start, const std::function<double(int)>& trunc_loss) {
  if (start < 1) throw DomainError("n_max must be positive");
  int n_max = start;
  while (trunc_loss(n_max) >= kTargetTruncLoss) {
    if (n_max >= kMaxNMax) {
      throw NumericError("Fock truncation exceeds n_max cap of " + std::to_string(kMaxNMax));
    }
    n_max = std::min(kMaxNMax, (3 * n_max + 1) / 2);
  }
  return n_max;
}

FockDensity from_ket(const Vector& ket, int n_max, int n_modes, double trunc_loss) {
  return {n_max, n_modes, ket * ket.transpose(), trunc_loss};
}

void check_compatible(const FockDensity& a, const FockDensity& b) {
  if (a.n_modes != b.n_modes || a.n_max != b.n_max) {
    throw DomainError("density matrices live on different truncated spaces");
  }
}

void check_truncation(const FockDensity& rho) {
  if (rho.trunc_loss >= kAcceptedTruncLoss) {
    throw NumericError("Fock truncation too coarse: discarded weight " +
                       std::to_string(rho.trunc_loss));
  }
}

// Rejects clearly negative eigenvalues. Below `zero` they are set to 0: the
// frac_power contract uses kZeroEigenvalue, square roots only need >= 0.
void clamp_spectrum(Vector& eig, double zero) {
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig(i) < kNegativeEigenvalue) {
      throw InvalidStateError("density matrix has eigenvalue " + std::to_string(eig(i)));
    }
    if (eig(i) < zero) eig(i) = 0.0;
  }
}

// Connected components of the union of the nonzero patterns. Each density
// matrix is block diagonal over these index sets, so spectra can be taken
// block by block.
std::vector<std::vector<int>> components(const std::vector<const Matrix*>& mats) {
  const int dim = static_cast<int>(mats.front()->rows());
  std::vector<int> parent(dim);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Matrix* m : mats) {
    for (int j = 0; j < dim; ++j) {
      for (int i = j + 1; i < dim; ++i) {
        if ((*m)(i, j) != 0.0) parent[find(i)] = find(j);
      }
    }
  }
  std::vector<int> slot(dim, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < dim; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

Matrix submatrix(const Matrix& m, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(idx[i], idx[j]);
  }
  return out;
}

struct Spectrum {
  Vector values;
  Matrix vectors;
};

Spectrum spectrum(const Matrix& block, double zero = kZeroEigenvalue) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  if (es.info() != Eigen::Success) throw NumericError("Fock eigensolver failed");
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  clamp_spectrum(s.values, zero);
  return s;
}

// Per-block spectra of both matrices plus squared eigenvector overlaps, so
// Tr(rho0^t rho1^(1-t)) = sum_ij l_i^t m_j^(1-t) |<u_i|w_j>|^2.
struct BlockPair {
  Vector lam0;
  Vector lam1;
  Matrix overlap2;
};

std::vector<BlockPair> block_pairs(const FockDensity& rho0, const FockDensity& rho1) {
  std::vector<BlockPair> out;
  for (const auto& idx : components({&rho0.matrix, &rho1.matrix})) {
    const Spectrum s0 = spectrum(submatrix(rho0.matrix, idx));
    const Spectrum s1 = spectrum(submatrix(rho1.matrix, idx));
    out.push_back({s0.values, s1.values, (s0.vectors.transpose() * s1.vectors).cwiseAbs2()});
  }
  return out;
}

double power_trace(const std::vector<BlockPair>& blocks, double t) {
  double total = 0.0;
  for (const auto& b : blocks) {
    const Vector p0 = b.lam0.array().pow(t);
    const Vector p1 = b.lam1.array().pow(1.0 - t);
    total += p0.dot(b.overlap2 * p1);
  }
  return total;
}

// Photon number of `mode` at basis index i.
int photons(const FockDensity& rho, int i, int mode) {
  const int d = rho.n_max + 1;
  if (rho.n_modes == 1) return i;
  return mode == 0 ? i / d : i % d;
}

}  // namespace

FockDensity tmsv_fock(double n_s, int n_max) {
  if (!(n_s >= 0.0) || !std::isfinite(n_s)) throw DomainError("n_s must be >= 0");
  const double lambda = n_s / (1.0 + n_s);  // tanh^2 xi
  n_max = grow_n_max(n_max, [lambda](int n) { return std::pow(lambda, n + 1); });
  const int d = n_max + 1;
  Vector ket = Vector::Zero(d * d);
  for (int n = 0; n < d; ++n) ket(n * d + n) = std::sqrt((1.0 - lambda) * std::pow(lambda, n));
  return from_ket(ket, n_max, 2, std::pow(lambda, n_max + 1));
}

FockDensity coherent_fock(double alpha, int n_max) {
  const double mean = alpha * alpha;
  auto poisson = [mean](int n) {
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  };
  auto tail = [&](int n_max_) {
    if (mean == 0.0) return 0.0;
    double sum = 0.0;
    for (int n = n_max_ + 1;; ++n) {
      const double p = poisson(n);
      sum += p;
      if (n > mean && p < 1e-20 * std::max(sum, 1e-300)) break;
    }
    return sum;
  };
  n_max = grow_n_max(n_max, tail);
  Vector ket = Vector::Zero(n_max + 1);
  ket(0) = std::exp(-0.5 * mean);
  for (int n = 1; n <= n_max; ++n) ket(n) = ket(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return from_ket(ket, n_max, 1, tail(n_max));
}

FockDensity thermal_fock(double nbar, int n_max) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("nbar must be >= 0");
  const double lambda = nbar / (1.0 + nbar);
  n_max = grow_n_max(n_max, [lambda](int n) { return std::pow(lambda, n + 1); });
  Matrix m = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) m(n, n) = (1.0 - lambda) * std::pow(lambda, n);
  return {n_max, 1, m, std::pow(lambda, n_max + 1)};
}

FockDensity apply_pure_loss_fock(const FockDensity& rho, int mode, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivity must lie in [0,1]");
  if (mode < 0 || mode >= rho.n_modes) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range");
  }
  const int d = rho.n_max + 1;
  // kraus(k, n) = <n-k| E_k |n> = sqrt(C(n,k) r^(n-k) (1-r)^k)
  Matrix kraus = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int k = 0; k <= n; ++k) {
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      kraus(k, n) = std::sqrt(std::exp(log_binom) * std::pow(r, n - k) * std::pow(1.0 - r, k));
    }
  }
  const int stride = (rho.n_modes == 2 && mode == 0) ? d : 1;
  FockDensity out{rho.n_max, rho.n_modes, Matrix::Zero(rho.dim(), rho.dim()), rho.trunc_loss};
  for (int j = 0; j < rho.dim(); ++j) {
    const int y = photons(rho, j, mode);
    for (int i = 0; i < rho.dim(); ++i) {
      const double v = rho.matrix(i, j);
      if (v == 0.0) continue;
      const int x = photons(rho, i, mode);
      for (int k = 0; k <= std::min(x, y); ++k) {
        out.matrix(i - k * stride, j - k * stride) += kraus(k, x) * kraus(k, y) * v;
      }
    }
  }
  return out;
}

double mean_photon_number(const FockDensity& rho, int mode) {
  if (mode < 0 || mode >= rho.n_modes) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range");
  }
  double n = 0.0;
  for (int i = 0; i < rho.dim(); ++i) n += photons(rho, i, mode) * rho.matrix(i, i);
  return n;
}

Matrix frac_power(const FockDensity& rho, double p) {
  if (!(p > 0.0)) throw DomainError("power must be positive");
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& idx : components({&rho.matrix})) {
    const Spectrum s = spectrum(submatrix(rho.matrix, idx));
    const Vector powered = s.values.array().pow(p);
    const Matrix block = s.vectors * powered.asDiagonal() * s.vectors.transpose();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i], idx[j]) = block(i, j);
    }
  }
  return out;
}

double overlap_t_fock(const FockDensity& rho0, const FockDensity& rho1, double t) {
  check_compatible(rho0, rho1);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0,1)");
  return power_trace(block_pairs(rho0, rho1), clamp_chernoff_t(t));
}

double overlap_fock(const FockDensity& rho0, const FockDensity& rho1) {
  check_compatible(rho0, rho1);
  return rho0.matrix.cwiseProduct(rho1.matrix).sum();
}

ChernoffResult qcb_fock(const FockDensity& rho0, const FockDensity& rho1) {
  check_compatible(rho0, rho1);
  check_truncation(rho0);
  check_truncation(rho1);
  const auto blocks = block_pairs(rho0, rho1);
  return minimize_over_t([&blocks](double t) { return power_trace(blocks, t); });
}

double fidelity_fock(const FockDensity& rho0, const FockDensity& rho1) {
  check_compatible(rho0, rho1);
  check_truncation(rho0);
  check_truncation(rho1);
  auto matrix_sqrt = [](const Matrix& m) {
    const Spectrum s = spectrum(m, 0.0);
    return Matrix(s.vectors * s.values.cwiseSqrt().asDiagonal() * s.vectors.transpose());
  };
  // tr sqrt(sqrt(rho0) rho1 sqrt(rho0)) is the nuclear norm of sqrt(rho1) sqrt(rho0).
  // Taking singular values directly avoids square roots of roundoff eigenvalues.
  double root_fidelity = 0.0;
  for (const auto& idx : components({&rho0.matrix, &rho1.matrix})) {
    const Matrix product = matrix_sqrt(submatrix(rho1.matrix, idx)) * matrix_sqrt(submatrix(rho0.matrix, idx));
    Eigen::JacobiSVD<Matrix> svd(product);
    root_fidelity += svd.singularValues().sum();
  }
  return root_fidelity * root_fidelity;
}

}  // namespace qread::fock

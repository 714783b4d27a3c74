#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qread/fock.hpp"
#include "qread/gaussian.hpp"

using namespace qread;

namespace {

GaussianState lossy_tmsv(double n_s, double r) { return apply_channel(tmsv_state(n_s), 0, pure_loss(r)); }

}  // namespace

TEST_CASE("tmsv covariance blocks") {
  CHECK(tmsv_state(0.0).cov().isApprox(Matrix::Identity(4, 4), 0.0));

  const auto s = tmsv_state(1.0);
  CHECK(s.cov()(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.cov()(2, 2) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.cov()(0, 2) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.cov()(1, 3) == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.cov()(0, 1) == 0.0);
  CHECK(s.mean().isZero());
  CHECK(symplectic_eigenvalues(s).is_pure());

  for (double n_s : {0.0, 0.3, 1.0, 7.0, 50.0}) {
    CHECK(tmsv_state(n_s).cov().determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(tmsv_state(-0.1), DomainError);
}

TEST_CASE("tmsv purity across energies") {
  for (double n_s : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    for (double nu : symplectic_eigenvalues(tmsv_state(n_s)).eigenvalues) {
      CHECK(std::abs(nu - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("channel constructors") {
  const auto id = pure_loss(1.0);
  CHECK(id.scale == 1.0);
  CHECK(id.added_noise == 0.0);
  for (double r : {0.0, 0.3, 0.8}) {
    const auto a = thermal_loss(r, 0.0);
    const auto b = pure_loss(r);
    CHECK(a.scale == b.scale);
    CHECK(a.added_noise == b.added_noise);
  }
  CHECK(add_noise(0.0).scale == 1.0);
  CHECK(add_noise(0.0).added_noise == 0.0);
  CHECK(thermal_loss(0.5, 2.0).added_noise == doctest::Approx(0.5 * 5.0));

  CHECK_THROWS_AS(pure_loss(-0.01), DomainError);
  CHECK_THROWS_AS(pure_loss(1.01), DomainError);
  CHECK_THROWS_AS(thermal_loss(0.5, -1.0), DomainError);
  CHECK_THROWS_AS(add_noise(-1e-3), DomainError);
}

TEST_CASE("channel composition law") {
  const auto s = tmsv_state(0.7);
  for (double r1 : {0.2, 0.9}) {
    for (double r2 : {0.5, 1.0}) {
      const auto twice = apply_channel(apply_channel(s, 0, pure_loss(r1)), 0, pure_loss(r2));
      const auto once = apply_channel(s, 0, pure_loss(r1 * r2));
      CHECK((twice.cov() - once.cov()).cwiseAbs().maxCoeff() < 1e-14);
      const auto c = compose(pure_loss(r2), pure_loss(r1));
      CHECK(c.scale == doctest::Approx(std::sqrt(r1 * r2)).epsilon(1e-15));
      CHECK(c.added_noise == doctest::Approx(1.0 - r1 * r2).epsilon(1e-14));
    }
  }
  // noise then loss: (s2^2 n1 + n2)
  const auto c = compose(thermal_loss(0.5, 1.0), add_noise(0.2));
  CHECK(c.scale == doctest::Approx(std::sqrt(0.5)));
  CHECK(c.added_noise == doctest::Approx(0.5 * 0.2 + 0.5 * 3.0));
  const auto st = apply_channel(apply_channel(s, 0, add_noise(0.2)), 0, thermal_loss(0.5, 1.0));
  CHECK((st.cov() - apply_channel(s, 0, c).cov()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("apply_channel") {
  const auto vac = GaussianState::vacuum(1);
  CHECK(apply_channel(vac, 0, pure_loss(0.37)).cov().isApprox(Matrix::Identity(2, 2), 1e-15));

  const double n_s = 0.8, r = 0.35;
  const auto out = lossy_tmsv(n_s, r);
  const double c = 2.0 * std::sqrt(n_s * (n_s + 1.0));
  CHECK(out.block(0, 0).isApprox((2.0 * r * n_s + 1.0) * Matrix::Identity(2, 2), 1e-14));
  CHECK(out.block(1, 1).isApprox((2.0 * n_s + 1.0) * Matrix::Identity(2, 2), 1e-14));
  CHECK(out.cov()(0, 2) == doctest::Approx(std::sqrt(r) * c).epsilon(1e-14));
  CHECK(out.cov()(1, 3) == doctest::Approx(-std::sqrt(r) * c).epsilon(1e-14));

  const auto coh = apply_channel(GaussianState::coherent(1.5, -0.5), 0, pure_loss(0.25));
  CHECK(coh.mean()(0) == doctest::Approx(1.5));
  CHECK(coh.mean()(1) == doctest::Approx(-0.5));

  CHECK_THROWS_AS(apply_channel(out, 2, pure_loss(0.5)), std::out_of_range);
  CHECK_THROWS_AS(apply_channel(out, -1, pure_loss(0.5)), std::out_of_range);
  CHECK_THROWS_AS(apply_channel(out, 0, BosonicChannel{0.5, 0.1}), DomainError);
}

TEST_CASE("state validation") {
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(GaussianState(Vector::Zero(2), bad), InvalidStateError);
  CHECK_THROWS_AS(GaussianState(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)), InvalidStateError);
  CHECK_THROWS_AS(GaussianState(Vector::Zero(3), Matrix::Identity(3, 3)), InvalidStateError);
  CHECK_THROWS_AS(GaussianState(Vector::Zero(4), Matrix::Identity(2, 2)), InvalidStateError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(GaussianState(Vector::Zero(2), nan), InvalidStateError);
  // squeezed vacuum is physical
  Matrix sq = Matrix::Identity(2, 2);
  sq(0, 0) = 0.25;
  sq(1, 1) = 4.0;
  CHECK_NOTHROW(GaussianState(Vector::Zero(2), sq));
}

TEST_CASE("symplectic eigenvalues") {
  for (double nu : symplectic_eigenvalues(GaussianState::vacuum(2)).eigenvalues) CHECK(nu == doctest::Approx(1.0));
  CHECK(symplectic_eigenvalues(GaussianState::thermal(2.5)).eigenvalues.at(0) == doctest::Approx(6.0));

  const auto s = lossy_tmsv(1.3, 0.45);
  const auto spec = symplectic_eigenvalues(s);
  REQUIRE(spec.eigenvalues.size() == 2);
  CHECK(spec.eigenvalues[0] >= spec.eigenvalues[1]);
  CHECK(spec.eigenvalues[0] * spec.eigenvalues[1] == doctest::Approx(std::sqrt(s.cov().determinant())).epsilon(1e-12));
  CHECK_FALSE(spec.is_pure());
}

TEST_CASE("williamson normal form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = apply_channel(tmsv_state(3.0 * u(rng)), 0, thermal_loss(u(rng), u(rng)));
    s = apply_channel(s, 1, add_noise(0.5 * u(rng)));
    const auto w = williamson(s.cov());
    const Matrix& S = w.symplectic;
    const Matrix om = oracle::omega(2);
    CHECK((S * om * S.transpose() - om).cwiseAbs().maxCoeff() < 1e-10);
    Vector d(4);
    d << w.nu[0], w.nu[0], w.nu[1], w.nu[1];
    CHECK((S * d.asDiagonal() * S.transpose() - s.cov()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(w.nu[0] >= w.nu[1]);
  }
}

TEST_CASE("physicality preserved under random channels") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = tmsv_state(5.0 * u(rng));
    for (int step = 0; step < 3; ++step) {
      const int mode = static_cast<int>(rng() % 2);
      const BosonicChannel ch =
          step == 1 ? add_noise(u(rng)) : thermal_loss(u(rng), 0.1 * u(rng));
      s = apply_channel(s, mode, ch);
    }
    for (double nu : symplectic_eigenvalues(s).eigenvalues) CHECK(nu >= 1.0 - 1e-9);
  }
}

TEST_CASE("gaussian overlap") {
  CHECK(gaussian_overlap(GaussianState::vacuum(), GaussianState::vacuum()) == doctest::Approx(1.0));
  const auto a = GaussianState::coherent(0.6, 0.2);
  const auto b = GaussianState::coherent(-0.3, 0.5);
  const double d2 = 0.9 * 0.9 + 0.3 * 0.3;
  CHECK(gaussian_overlap(a, b) == doctest::Approx(std::exp(-d2)).epsilon(1e-14));
  const auto x = lossy_tmsv(0.4, 0.3);
  const auto y = lossy_tmsv(0.9, 0.8);
  CHECK(gaussian_overlap(x, y) == doctest::Approx(gaussian_overlap(y, x)).epsilon(1e-14));
  // purity Tr rho^2 = 1 / sqrt(det V)
  CHECK(gaussian_overlap(x, x) == doctest::Approx(1.0 / std::sqrt(x.cov().determinant())).epsilon(1e-13));
  CHECK_THROWS_AS(gaussian_overlap(GaussianState::vacuum(1), GaussianState::vacuum(2)), DomainError);
}

TEST_CASE("qcb_overlap_t edge cases") {
  const auto p = lossy_tmsv(0.5, 1.0);
  for (double t : {0.1, 0.5, 0.9}) CHECK(qcb_overlap_t(p, p, t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(qcb_overlap_t(p, p, 0.0), DomainError);
  CHECK_THROWS_AS(qcb_overlap_t(p, p, 1.0), DomainError);
  CHECK_THROWS_AS(qcb_overlap_t(p, p, std::nan("")), DomainError);
  // t inside (0, 1e-4) is clamped, not rejected
  CHECK(qcb_overlap_t(lossy_tmsv(0.5, 0.4), p, 1e-7) == doctest::Approx(qcb_overlap_t(lossy_tmsv(0.5, 0.4), p, 1e-4)));
}

TEST_CASE("qcb_overlap_t matches matrix-function oracle") {
  const Vector zero = Vector::Zero(4);
  for (double n_s : {0.1, 0.5, 2.0}) {
    for (double r0 : {0.0, 0.4, 0.9}) {
      for (double r1 : {0.6, 1.0}) {
        const auto a = lossy_tmsv(n_s, r0);
        const auto b = lossy_tmsv(n_s, r1);
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
          const double ref = oracle::q_t(oracle::lossy_tmsv_cov(n_s, r0), oracle::lossy_tmsv_cov(n_s, r1), zero, t);
          CHECK(qcb_overlap_t(a, b, t) == doctest::Approx(ref).epsilon(1e-9));
        }
      }
    }
  }
  // displaced and thermal single-mode states
  const auto c = GaussianState::coherent(0.8);
  const auto th = apply_channel(GaussianState::coherent(0.3, 0.4), 0, thermal_loss(0.7, 0.5));
  Vector delta = c.mean() - th.mean();
  for (double t : {0.2, 0.5, 0.8}) {
    CHECK(qcb_overlap_t(c, th, t) == doctest::Approx(oracle::q_t(c.cov(), th.cov(), delta, t)).epsilon(1e-10));
  }
}

TEST_CASE("qcb_overlap_t ideal-memory closed form") {
  // With one pure output, Q_t = p0^(t-1) |<psi|phi>|^2 where the mixed state is
  // lam-geometric in the Schmidt basis.
  for (double n_s : {0.2, 1.0, 4.0}) {
    for (double r0 : {0.0, 0.5, 0.85}) {
      const double lam = n_s / (1.0 + n_s);
      const double p0 = (1.0 - lam) / (1.0 - lam * r0);
      const double ov = (1.0 - lam) / (1.0 - lam * std::sqrt(r0));
      for (double t : {0.25, 0.5, 0.75}) {
        const double expected = std::pow(p0, t - 1.0) * ov * ov;
        CHECK(qcb_overlap_t(lossy_tmsv(n_s, r0), lossy_tmsv(n_s, 1.0), t) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("qcb minimization") {
  const auto a = lossy_tmsv(0.5, 0.4);
  const auto b = lossy_tmsv(0.5, 1.0);
  const auto same = qcb(a, a);
  CHECK(same.q_min == doctest::Approx(1.0).epsilon(1e-12));

  const auto res = qcb(a, b);
  CHECK(res.t_star >= kChernoffTMin);
  CHECK(res.t_star <= 1.0 - kChernoffTMin);
  for (int i = 1; i < 20; ++i) CHECK(res.q_min <= qcb_overlap_t(a, b, i / 20.0) + 1e-15);

  const auto m0 = lossy_tmsv(0.8, 0.2);
  const auto m1 = lossy_tmsv(0.8, 0.7);
  const auto fwd = qcb(m0, m1);
  const auto bwd = qcb(m1, m0);
  CHECK(fwd.q_min == doctest::Approx(bwd.q_min).epsilon(1e-10));
  CHECK(fwd.t_star == doctest::Approx(1.0 - bwd.t_star).epsilon(1e-4));
  CHECK(qcb_overlap_t(m0, m1, 0.3) == doctest::Approx(qcb_overlap_t(m1, m0, 0.7)).epsilon(1e-12));
}

TEST_CASE("single-mode fidelity") {
  const auto th = GaussianState::thermal(0.7);
  CHECK(gaussian_fidelity_1mode(th, th) == doctest::Approx(1.0).epsilon(1e-12));
  const auto a = GaussianState::coherent(0.6, 0.1);
  const auto b = GaussianState::coherent(-0.2, 0.4);
  CHECK(gaussian_fidelity_1mode(a, b) == doctest::Approx(std::exp(-(0.64 + 0.09))).epsilon(1e-14));
  for (double nbar : {0.01, 0.5, 3.0}) {
    CHECK(gaussian_fidelity_1mode(GaussianState::vacuum(), GaussianState::thermal(nbar)) ==
          doctest::Approx(1.0 / (1.0 + nbar)).epsilon(1e-14));
  }
  // two thermal states: (sqrt((1+a)(1+b)) - sqrt(ab))^-2
  const double na = 0.4, nb = 1.7;
  const double ref = 1.0 / std::pow(std::sqrt((1 + na) * (1 + nb)) - std::sqrt(na * nb), 2);
  CHECK(gaussian_fidelity_1mode(GaussianState::thermal(na), GaussianState::thermal(nb)) == doctest::Approx(ref).epsilon(1e-13));
  CHECK_THROWS_AS(gaussian_fidelity_1mode(tmsv_state(0.1), tmsv_state(0.1)), DomainError);
}

TEST_CASE("single-mode fidelity against Fock") {
  CHECK(gaussian_fidelity_1mode(GaussianState::coherent(0.2), GaussianState::coherent(0.9)) ==
        doctest::Approx(fock::fidelity_fock(fock::coherent_fock(0.2), fock::coherent_fock(0.9))).epsilon(1e-10));
  CHECK(gaussian_fidelity_1mode(GaussianState::thermal(0.3), GaussianState::thermal(0.8)) ==
        doctest::Approx(fock::fidelity_fock(fock::thermal_fock(0.3), fock::thermal_fock(0.8))).epsilon(1e-9));
}

TEST_CASE("oracle equivalence grid") {
  for (double n_s : {0.1, 0.5, 1.0}) {
    const auto pure = fock::tmsv_fock(n_s);
    const auto f1 = fock::apply_pure_loss_fock(pure, 0, 1.0);
    const auto g1 = lossy_tmsv(n_s, 1.0);
    for (double r : {0.3, 0.7, 1.0}) {
      const auto f0 = fock::apply_pure_loss_fock(pure, 0, r);
      const auto g0 = lossy_tmsv(n_s, r);
      CHECK(std::abs(gaussian_overlap(g0, g1) - fock::overlap_fock(f0, f1)) < 1e-6);
      for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        CHECK(std::abs(qcb_overlap_t(g0, g1, t) - fock::overlap_t_fock(f0, f1, t)) < 1e-6);
      }
      CHECK(std::abs(qcb(g0, g1).q_min - fock::qcb_fock(f0, f1).q_min) < 1e-6);
      const double a0 = std::sqrt(r * n_s), a1 = std::sqrt(n_s);
      CHECK(std::abs(gaussian_fidelity_1mode(GaussianState::coherent(a0), GaussianState::coherent(a1)) -
                     fock::fidelity_fock(fock::coherent_fock(a0), fock::coherent_fock(a1))) < 1e-6);
    }
  }
}

TEST_CASE("noiseless reduction of the fidelity bound") {
  for (double N : {1.0, 30.0}) {
    for (auto [r0, r1] : {std::pair{0.2, 0.9}, std::pair{0.85, 1.0}}) {
      for (int M : {1, 10, 1000}) {
        const double n = N / M;
        const double F = gaussian_fidelity_1mode(GaussianState::coherent(std::sqrt(n * r0)),
                                                 GaussianState::coherent(std::sqrt(n * r1)));
        const double C = 0.5 * (1.0 - std::sqrt(1.0 - std::pow(F, M)));
        CHECK(std::abs(C - oracle::classical_c(N, r0, r1)) < 1e-12);
      }
    }
  }
}

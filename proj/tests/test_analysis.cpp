#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bridgeblock/analysis.hpp"
#include "bridgeblock/diagnostics.hpp"
#include "bridgeblock/tridiag_eigen.hpp"

using namespace bridgeblock;

TEST_CASE("conditional covariance: small-theta limit is the Brownian bridge") {
  // Brownian bridge on [0, 3]: Var(X_1) = Var(X_2) = 2/3, Cov = 1/3
  const auto cov = conditional_cov_ou(1.0, 2.0, 3.0, 1e-7, 1.0);
  CHECK(cov(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK(cov(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK(cov(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("conditional covariance: time-reversal symmetry") {
  for (double theta : {0.5, 1.0, 2.0}) {
    const double s = 0.7, t = 1.9, T = 3.1;
    const auto fwd = conditional_cov_ou(s, t, T, theta, 1.3);
    const auto rev = conditional_cov_ou(T - t, T - s, T, theta, 1.3);
    CHECK(fwd(0, 0) == doctest::Approx(rev(1, 1)).epsilon(1e-12));
    CHECK(fwd(1, 1) == doctest::Approx(rev(0, 0)).epsilon(1e-12));
    CHECK(fwd(0, 1) == doctest::Approx(rev(0, 1)).epsilon(1e-12));
  }
}

namespace {

// Schur-complement oracle: condition the unconditional covariance of
// (X_s, X_t) on X_T, for the process started deterministically at 0.
Eigen::Matrix2d schur_oracle(double s, double t, double T, double theta,
                             double sigma) {
  auto k = [&](double a, double b) {
    if (a > b) std::swap(a, b);
    return sigma * sigma / (2.0 * theta) *
           (std::exp(-theta * (b - a)) - std::exp(-theta * (a + b)));
  };
  Eigen::Matrix2d K;
  K << k(s, s), k(s, t), k(s, t), k(t, t);
  Eigen::Vector2d kT(k(s, T), k(t, T));
  return K - kT * kT.transpose() / k(T, T);
}

}  // namespace

TEST_CASE("conditional covariance matches the Schur oracle") {
  for (double theta : {0.5, 1.0, 2.0})
    for (double delta : {0.1, 0.5, 2.0}) {
      const auto got = conditional_cov_ou(delta, 2 * delta, 3 * delta, theta, 1.0);
      const auto want = schur_oracle(delta, 2 * delta, 3 * delta, theta, 1.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          REQUIRE(std::abs(got(i, j) - want(i, j)) < 1e-10);
    }
  // large theta * T must not overflow or lose symmetry
  const auto big = conditional_cov_ou(10.0, 20.0, 30.0, 50.0, 1.0);
  CHECK(std::isfinite(big(0, 0)));
  CHECK(big(0, 0) == doctest::Approx(1.0 / 100.0).epsilon(1e-6));
  CHECK(std::abs(big(0, 1)) < 1e-12);

  CHECK_THROWS_AS(conditional_cov_ou(2.0, 1.0, 3.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("partial correlation") {
  const auto bm = DiffusionModel::scaled_bm(1.7, 0.4);
  for (double d : {0.01, 0.5, 3.0}) CHECK(partial_corr(bm, d) == 0.5);

  const auto ou = DiffusionModel::ou(1.0, 1.0);
  CHECK(partial_corr(ou, 1e-4) == doctest::Approx(0.5).epsilon(1e-6));
  double prev = 0.5;
  for (double d : {0.1, 0.5, 1.0, 2.0}) {
    const double c = partial_corr(ou, d);
    CHECK(c < prev);
    CHECK(c > 0.0);
    prev = c;
  }

  CHECK_THROWS_AS(partial_corr(DiffusionModel::sine(), 0.1), UnsupportedModel);
  CHECK_THROWS_AS(partial_corr(ou, 0.0), std::invalid_argument);
}

TEST_CASE("partial correlation agrees with the knot-law correlation") {
  // independent route: Corr(X_d, X_2d | X_0, X_3d) from the conditional
  // Gaussian of the two interior knots
  for (double theta : {0.5, 2.0})
    for (double d : {0.2, 1.0}) {
      const auto ou = DiffusionModel::ou(theta, 1.0);
      const auto law = knot_law_gaussian(ou, 0.0, 0.0, 3 * d, {d, 2 * d});
      const double corr =
          law.cov(0, 1) / std::sqrt(law.cov(0, 0) * law.cov(1, 1));
      REQUIRE(partial_corr(ou, d) == doctest::Approx(corr).epsilon(1e-10));
    }
}

TEST_CASE("tridiagonal Toeplitz matrix and spectrum") {
  const auto A = build_matrix_A(3, 0.5);
  CHECK(A(0, 1) == 0.5);
  CHECK(A(1, 0) == 0.5);
  CHECK(A(0, 0) == 0.0);
  CHECK(A(0, 2) == 0.0);

  for (int m : {2, 10, 25})
    for (double c : {-0.49, 0.1, 0.5}) {
      auto want = toeplitz_spectrum(m, c);
      std::sort(want.begin(), want.end());
      std::vector<double> diag(m, 0.0), off(m - 1, c);
      auto got = tridiag_eigenvalues(diag, off);
      std::sort(got.begin(), got.end());
      for (int i = 0; i < m; ++i) REQUIRE(std::abs(got[i] - want[i]) < 1e-10);
    }

  CHECK(lambda_max_A(3, 0.5) ==
        doctest::Approx(std::cos(std::numbers::pi / 4.0)));
  CHECK(lambda_max_A(3, -0.5) == lambda_max_A(3, 0.5));
}

TEST_CASE("convergence rates") {
  CHECK(convergence_rate(Scheme::Checkerboard, 3, 0.5) == doctest::Approx(0.5));
  CHECK(convergence_rate(Scheme::Lexicographic, 3, 0.5) == doctest::Approx(0.5));
  CHECK(convergence_rate(Scheme::Checkerboard, 1, 0.5) ==
        doctest::Approx(0.0).epsilon(0.0).scale(1.0).epsilon(1e-12));
  CHECK(convergence_rate(Scheme::Random, 2, 0.5) == doctest::Approx(0.5625));
  CHECK_THROWS_AS(convergence_rate(Scheme::Checkerboard, 100, 0.51),
                  RateNotLessThanOne);

  // random-scan deficit approaches half the deterministic deficit
  const double rc = convergence_rate(Scheme::Checkerboard, 200, 0.5);
  const double rr = convergence_rate(Scheme::Random, 200, 0.5);
  CHECK((1.0 - rr) / (1.0 - rc) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("relaxation time") {
  CHECK(relaxation_time(std::exp(-1.0)) == doctest::Approx(1.0));
  CHECK(relaxation_time(0.0) == 0.0);
  CHECK(relaxation_time(-0.3) == 0.0);
  CHECK_THROWS_AS(relaxation_time(1.0), InvalidRate);

  // quadratic growth in the number of knots for the checkerboard sweep
  const double relax =
      relaxation_time(convergence_rate(Scheme::Checkerboard, 100, 0.5));
  CHECK(relax == doctest::Approx(101.0 * 101.0 / (std::numbers::pi *
                                                  std::numbers::pi))
                     .epsilon(0.01));
}

TEST_CASE("sweep and blocking costs") {
  const auto ou = DiffusionModel::ou(1.0, 1.0);
  // one knot: a sweep redraws the whole interval
  CHECK(cost_sweep(2.0, 1, ou) == doctest::Approx(expected_cost_rej(ou, 2.0, 0.0, 0.0)));
  // fixed block width: cost per knot is constant
  const double d = 0.1;
  CHECK(cost_sweep(6.0 * d, 5, ou) / 5.0 ==
        doctest::Approx(cost_sweep(11.0 * d, 10, ou) / 10.0).epsilon(1e-12));

  // single-knot blocking charges exactly one sweep
  CHECK(cost_blocking(2.0, 1, ou, Scheme::Checkerboard) ==
        doctest::Approx(expected_cost_rej(ou, 2.0, 0.0, 0.0)));

  // with mean reversion the total cost has an interior optimum in m
  const double T = 10.0;
  int best = 1;
  double best_cost = cost_blocking(T, 1, ou, Scheme::Checkerboard);
  for (int m = 2; m <= 60; ++m) {
    const double c = cost_blocking(T, m, ou, Scheme::Checkerboard);
    if (c < best_cost) {
      best_cost = c;
      best = m;
    }
  }
  CHECK(best > 1);
  CHECK(best < 60);

  // driftless case with delta fixed near 0.1: total cost scales like T^3
  const auto bm = DiffusionModel::scaled_bm(1.0);
  const double r20 =
      cost_blocking(20.0, optimal_num_knots(20.0), bm, Scheme::Checkerboard) /
      (20.0 * 20.0 * 20.0);
  const double r40 =
      cost_blocking(40.0, optimal_num_knots(40.0), bm, Scheme::Checkerboard) /
      (40.0 * 40.0 * 40.0);
  CHECK(r20 == doctest::Approx(r40).epsilon(0.10));
}

TEST_CASE("knot-count rule") {
  CHECK(optimal_num_knots(2.0) == 20);
  CHECK(optimal_num_knots(5.0, 1.0, 0.0) == 5);
  CHECK(optimal_num_knots(10.0, 1.0, 0.1) == 13);  // ceil(10^1.1)
  CHECK_THROWS_AS(optimal_num_knots(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("Gaussian knot law: driftless closed forms") {
  const auto bm = DiffusionModel::scaled_bm(2.0);
  const auto law = knot_law_gaussian(bm, 1.0, 3.0, 1.0, {0.5});
  CHECK(law.mean(0) == doctest::Approx(2.0));
  CHECK(law.cov(0, 0) == doctest::Approx(4.0 * 0.25));

  const auto law2 = knot_law_gaussian(bm, 0.0, 0.0, 3.0, {1.0, 2.0});
  // Markov precision of the bridge: -Lambda_01 / Lambda_00 = 1/2
  CHECK(-law2.precision(0, 1) / law2.precision(0, 0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(
      knot_law_gaussian(DiffusionModel::sine(), 0.0, 0.0, 1.0, {0.5}),
      UnsupportedModel);
}

TEST_CASE("knot law precision is tridiagonal") {
  const auto ou = DiffusionModel::ou(1.3, 0.8);
  std::vector<double> anchors;
  for (int i = 1; i <= 6; ++i) anchors.push_back(2.0 * i / 7.0);
  const auto law = knot_law_gaussian(ou, 0.2, -0.4, 2.0, anchors);
  const double scale = law.precision.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (std::abs(i - j) > 1) REQUIRE(std::abs(law.precision(i, j)) < 1e-8 * scale);
}

TEST_CASE("knot law matches a sequential bridge-sampling oracle") {
  // Draw (Y_{k_1}, Y_{k_2}, Y_{k_3}) from the bridge by chaining the scalar
  // two-density conditionals; no matrix conditioning involved.
  const double theta = 1.0, sigma = 1.0, T = 2.0, x0 = 0.3, xT = -0.5;
  const auto ou = DiffusionModel::ou(theta, sigma);
  const std::vector<double> anchors = {0.5, 1.0, 1.5};
  const auto law = knot_law_gaussian(ou, x0, xT, T, anchors);

  RngStream rng(301);
  const int n = 300000, m = 3;
  auto tvar = [&](double dt) {
    return sigma * sigma * (1.0 - std::exp(-2.0 * theta * dt)) / (2.0 * theta);
  };
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d sum2 = Eigen::Matrix3d::Zero();
  for (int rep = 0; rep < n; ++rep) {
    Eigen::Vector3d y;
    double prev = x0, tprev = 0.0;
    for (int i = 0; i < m; ++i) {
      const double dt = anchors[i] - tprev, s = T - anchors[i];
      const double a = prev * std::exp(-theta * dt), v1 = tvar(dt);
      const double e = std::exp(-theta * s), v2 = tvar(s);
      const double prec = 1.0 / v1 + e * e / v2;
      const double mean = (a / v1 + xT * e / v2) / prec;
      y(i) = mean + rng.normal() / std::sqrt(prec);
      prev = y(i);
      tprev = anchors[i];
    }
    sum += y;
    sum2 += y * y.transpose();
  }
  const Eigen::Vector3d mc_mean = sum / n;
  const Eigen::Matrix3d mc_cov = sum2 / n - mc_mean * mc_mean.transpose();
  for (int i = 0; i < m; ++i) {
    REQUIRE(mc_mean(i) ==
            doctest::Approx(law.mean(i)).epsilon(0.0).scale(1.0).epsilon(0.005));
    for (int j = 0; j < m; ++j)
      REQUIRE(mc_cov(i, j) ==
              doctest::Approx(law.cov(i, j)).epsilon(0.0).scale(1.0).epsilon(0.005));
  }
}

TEST_CASE("sweep kernel") {
  const auto bm = DiffusionModel::scaled_bm(1.0);
  const auto law = knot_law_gaussian(bm, 0.5, -1.0, 1.0, {0.2, 0.4, 0.6, 0.8});

  for (Scheme s : {Scheme::Checkerboard, Scheme::Lexicographic}) {
    const auto k = gibbs_kernel_B(law, s);
    // the stationary mean is a fixed point
    const Eigen::VectorXd fix = k.B * law.mean + k.b;
    for (int i = 0; i < 4; ++i)
      REQUIRE(std::abs(fix(i) - law.mean(i)) < 1e-10);
  }

  // both deterministic orders share the spectral radius, and it matches the
  // closed form 4 c^2 cos^2(pi / (m+1)) with c = 1/2
  const double rc = spectral_radius_power(gibbs_kernel_B(law, Scheme::Checkerboard).B);
  const double rl = spectral_radius_power(gibbs_kernel_B(law, Scheme::Lexicographic).B);
  CHECK(std::abs(rc - rl) < 1e-8);
  CHECK(rc == doctest::Approx(convergence_rate(Scheme::Checkerboard, 4, 0.5))
                  .epsilon(1e-8));

  CHECK_THROWS_AS(gibbs_kernel_B(law, Scheme::Random), UnsupportedModel);
}

TEST_CASE("power iteration") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 0.9;
  d(1, 1) = -0.4;
  d(2, 2) = 0.1;
  CHECK(spectral_radius_power(d) == doctest::Approx(0.9).epsilon(1e-10));

  Eigen::MatrixXd n(2, 2);
  n << -0.9, 1.0, 0.0, 0.2;  // dominant eigenvalue is negative
  CHECK(spectral_radius_power(n) == doctest::Approx(0.9).epsilon(1e-8));

  CHECK(spectral_radius_power(Eigen::MatrixXd::Zero(2, 2)) == 0.0);
}

TEST_CASE("knot-only chains decay at the closed-form rates") {
  const auto bm = DiffusionModel::scaled_bm(1.0);
  RngStream rng(302);
  const int m = 5;
  std::vector<double> anchors;
  for (int i = 1; i <= m; ++i) anchors.push_back(double(i) / (m + 1));
  const auto law = knot_law_gaussian(bm, 0.0, 0.0, 1.0, anchors);

  Eigen::VectorXd top(m);
  for (int i = 0; i < m; ++i)
    top(i) = std::sin(std::numbers::pi * (i + 1) / (m + 1));

  for (Scheme s : {Scheme::Checkerboard, Scheme::Lexicographic, Scheme::Random}) {
    const auto chain = simulate_knot_chain(law, s, 200000, rng);
    std::vector<double> proj(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      double acc = 0;
      for (int j = 0; j < m; ++j) acc += top(j) * chain[i][j];
      proj[i] = acc;
    }
    const auto rho = autocorrelation(proj, 25);
    const double fitted = fit_geometric_rate(rho);
    REQUIRE(fitted == doctest::Approx(convergence_rate(s, m, 0.5)).epsilon(0.10));
  }
}

TEST_CASE("rate report") {
  const auto bm = DiffusionModel::scaled_bm(1.0);
  const auto r = rate_report(bm, Scheme::Checkerboard, 3, 1.0);
  CHECK(r.delta == doctest::Approx(0.25));
  CHECK(r.c_delta == doctest::Approx(0.5));
  CHECK(r.rho == doctest::Approx(0.5));
  CHECK(r.relaxation_time == doctest::Approx(-1.0 / std::log(0.5)));
}

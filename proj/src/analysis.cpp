#include "bridgeblock/analysis.hpp"

#include <cmath>
#include <numbers>

#include "bridgeblock/bridge.hpp"

namespace bridgeblock {

namespace {

// e^{-theta T} sinh(theta s) sinh(theta t) / sinh(theta T) without overflow:
// every surviving exponent is <= 0 for 0 < s, t < T.
double bridge_shrink_term(double s, double t, double T, double theta) {
  const double num = (1.0 - std::exp(-2.0 * theta * s)) *
                     (1.0 - std::exp(-2.0 * theta * t));
  const double den = 1.0 - std::exp(-2.0 * theta * T);
  return 0.5 * std::exp(theta * (s + t - 2.0 * T)) * num / den;
}

// e^{-theta a} sinh(theta b) for a >= b > 0.
double decayed_sinh(double a, double b, double theta) {
  return 0.5 * (std::exp(theta * (b - a)) - std::exp(-theta * (a + b)));
}

}  // namespace

Eigen::Matrix2d conditional_cov_ou(double s, double t, double T, double theta,
                                   double sigma) {
  if (!(0.0 < s && s < t && t < T))
    throw std::invalid_argument("conditional_cov_ou: need 0 < s < t < T");
  if (theta <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("conditional_cov_ou: theta, sigma must be > 0");
  const double scale = sigma * sigma / theta;
  Eigen::Matrix2d cov;
  cov(0, 0) = scale * (decayed_sinh(s, s, theta) - bridge_shrink_term(s, s, T, theta));
  cov(0, 1) = scale * (decayed_sinh(t, s, theta) - bridge_shrink_term(s, t, T, theta));
  cov(1, 0) = cov(0, 1);
  cov(1, 1) = scale * (decayed_sinh(t, t, theta) - bridge_shrink_term(t, t, T, theta));
  return cov;
}

double partial_corr(const DiffusionModel& model, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("partial_corr: delta must be > 0");
  switch (model.kind()) {
    case ModelKind::ScaledBM:
      return 0.5;
    case ModelKind::OU: {
      const Eigen::Matrix2d cov =
          conditional_cov_ou(delta, 2.0 * delta, 3.0 * delta, model.theta(), 1.0);
      return cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
    }
    case ModelKind::Sine:
      throw UnsupportedModel("partial_corr: sine model has no closed form");
  }
  return 0.0;
}

Eigen::MatrixXd build_matrix_A(int m, double c) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    A(i, i + 1) = c;
    A(i + 1, i) = c;
  }
  return A;
}

std::vector<double> toeplitz_spectrum(int m, double c) {
  std::vector<double> eig(m);
  for (int l = 1; l <= m; ++l)
    eig[l - 1] = -2.0 * c * std::cos(std::numbers::pi * l / (m + 1));
  return eig;
}

double lambda_max_A(int m, double c) {
  return 2.0 * std::abs(c) * std::cos(std::numbers::pi / (m + 1));
}

double convergence_rate(Scheme scheme, int m, double c) {
  const double lmax = lambda_max_A(m, c);
  double rho;
  if (scheme == Scheme::Random)
    rho = std::pow((m - 1 + lmax) / m, m);
  else
    rho = lmax * lmax;
  if (rho >= 1.0)
    throw RateNotLessThanOne("convergence_rate: rho >= 1 (|c| too large?)");
  return rho;
}

double relaxation_time(double rho) {
  if (rho >= 1.0) throw InvalidRate("relaxation_time: rho must be < 1");
  if (rho <= 0.0) return 0.0;
  return -1.0 / std::log(rho);
}

double cost_sweep(double T, int m, const DiffusionModel& model) {
  if (m < 1) throw std::invalid_argument("cost_sweep: m must be >= 1");
  const double two_delta = 2.0 * T / (m + 1);
  return m * expected_cost_rej(model, two_delta, 0.0, 0.0);
}

double cost_blocking(double T, int m, const DiffusionModel& model,
                     Scheme scheme) {
  const double delta = T / (m + 1);
  const double rho = convergence_rate(scheme, m, partial_corr(model, delta));
  // A single-knot layout refreshes the path exactly; charge one sweep.
  const double sweeps = std::max(1.0, relaxation_time(rho));
  return sweeps * cost_sweep(T, m, model);
}

int optimal_num_knots(double T, double c1, double chi1) {
  if (c1 <= 0.0 || chi1 < 0.0)
    throw std::invalid_argument("optimal_num_knots: need c1 > 0, chi1 >= 0");
  return static_cast<int>(std::ceil(c1 * std::pow(T, 1.0 + chi1)));
}

namespace {

// Unconditional covariance of the process started at a deterministic x0,
// evaluated at times s <= t.
double process_cov(const DiffusionModel& model, double s, double t) {
  if (s > t) std::swap(s, t);
  const double s2 = model.sigma() * model.sigma();
  if (model.kind() == ModelKind::ScaledBM) return s2 * s;
  const double th = model.theta();
  return s2 / (2.0 * th) * (std::exp(-th * (t - s)) - std::exp(-th * (t + s)));
}

double process_mean(const DiffusionModel& model, double x0, double t) {
  if (model.kind() == ModelKind::ScaledBM) return x0 + model.mu() * t;
  return x0 * std::exp(-model.theta() * t);
}

}  // namespace

GaussianKnotLaw knot_law_gaussian(const DiffusionModel& model, double x0,
                                  double xT, double T,
                                  const std::vector<double>& anchors) {
  if (!model.has_transition_density())
    throw UnsupportedModel("knot_law_gaussian: model is not Gaussian");
  const int m = static_cast<int>(anchors.size());
  Eigen::MatrixXd K(m, m);
  Eigen::VectorXd kT(m), mu0(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      K(i, j) = process_cov(model, anchors[j], anchors[i]);
      K(j, i) = K(i, j);
    }
    kT(i) = process_cov(model, anchors[i], T);
    mu0(i) = process_mean(model, x0, anchors[i]);
  }
  const double vT = process_cov(model, T, T);
  const double muT = process_mean(model, x0, T);

  GaussianKnotLaw law;
  law.mean = mu0 + kT * ((xT - muT) / vT);
  law.cov = K - (kT * kT.transpose()) / vT;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(law.cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericallySingular("knot_law_gaussian: conditioning failed");
  law.precision = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
  return law;
}

namespace {

// Linear map of the joint conditional-mean update of coordinate set S given
// the rest: rows S become -Lambda_SS^{-1} Lambda_SR on the complement.
Eigen::MatrixXd block_update_map(const Eigen::MatrixXd& precision,
                                 const std::vector<int>& set) {
  const int m = static_cast<int>(precision.rows());
  const int k = static_cast<int>(set.size());
  std::vector<int> rest;
  std::vector<char> in_set(m, 0);
  for (int i : set) in_set[i] = 1;
  for (int i = 0; i < m; ++i)
    if (!in_set[i]) rest.push_back(i);

  Eigen::MatrixXd lam_ss(k, k), lam_sr(k, static_cast<int>(rest.size()));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) lam_ss(i, j) = precision(set[i], set[j]);
    for (std::size_t j = 0; j < rest.size(); ++j)
      lam_sr(i, static_cast<int>(j)) = precision(set[i], rest[j]);
  }
  const Eigen::MatrixXd gain = -lam_ss.ldlt().solve(lam_sr);

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < k; ++i) {
    M.row(set[i]).setZero();
    for (std::size_t j = 0; j < rest.size(); ++j)
      M(set[i], rest[j]) = gain(i, static_cast<int>(j));
  }
  return M;
}

std::vector<std::vector<int>> sweep_groups(int m, Scheme scheme) {
  std::vector<std::vector<int>> groups;
  if (scheme == Scheme::Checkerboard && m >= 2) {
    groups.resize(2);
    for (int i = 0; i < m; ++i) groups[i % 2].push_back(i);
  } else {
    for (int i = 0; i < m; ++i) groups.push_back({i});
  }
  return groups;
}

}  // namespace

SweepKernel gibbs_kernel_B(const GaussianKnotLaw& law, Scheme scheme) {
  if (scheme == Scheme::Random)
    throw UnsupportedModel("gibbs_kernel_B: random scheme has no fixed sweep map");
  const int m = static_cast<int>(law.mean.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m, m);
  for (const auto& g : sweep_groups(m, scheme))
    B = block_update_map(law.precision, g) * B;
  SweepKernel kernel;
  kernel.B = B;
  kernel.b = (Eigen::MatrixXd::Identity(m, m) - B) * law.mean;
  return kernel;
}

double spectral_radius_power(const Eigen::MatrixXd& M, int max_iters,
                             double tol) {
  const int m = static_cast<int>(M.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) v(i) += 0.01 * std::sin(1.0 + i);  // break symmetry
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = M * v;
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    w /= lambda;
    const double drift = std::min((w - v).norm(), (w + v).norm());
    v = w;
    if (drift < tol) break;
  }
  return lambda;
}

std::vector<std::vector<double>> simulate_knot_chain(const GaussianKnotLaw& law,
                                                     Scheme scheme,
                                                     long n_sweeps,
                                                     RngStream& rng) {
  const int m = static_cast<int>(law.mean.size());
  const auto groups = sweep_groups(m, scheme == Scheme::Random
                                          ? Scheme::Lexicographic
                                          : scheme);

  // Precompute per-group gain rows and conditional covariance factors.
  struct GroupUpdate {
    std::vector<int> set;
    Eigen::MatrixXd map;   // full m x m conditional-mean map
    Eigen::MatrixXd chol;  // lower Cholesky of Lambda_SS^{-1}
  };
  std::vector<GroupUpdate> updates;
  for (const auto& g : groups) {
    GroupUpdate u;
    u.set = g;
    u.map = block_update_map(law.precision, g);
    const int k = static_cast<int>(g.size());
    Eigen::MatrixXd lam_ss(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lam_ss(i, j) = law.precision(g[i], g[j]);
    const Eigen::MatrixXd cond_cov =
        lam_ss.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    u.chol = Eigen::LLT<Eigen::MatrixXd>(cond_cov).matrixL();
    updates.push_back(std::move(u));
  }

  Eigen::VectorXd x = law.mean;
  std::vector<std::vector<double>> chain;
  chain.reserve(n_sweeps);
  Eigen::VectorXd noise;
  for (long n = 0; n < n_sweeps; ++n) {
    for (std::size_t step = 0; step < updates.size(); ++step) {
      const GroupUpdate& u =
          scheme == Scheme::Random ? updates[rng.uniform_index(updates.size())]
                                   : updates[step];
      const Eigen::VectorXd mean =
          u.map * (x - law.mean) + law.mean;  // rows outside u.set equal x
      const int k = static_cast<int>(u.set.size());
      noise.resize(k);
      for (int i = 0; i < k; ++i) noise(i) = rng.normal();
      const Eigen::VectorXd shift = u.chol * noise;
      for (int i = 0; i < k; ++i) x(u.set[i]) = mean(u.set[i]) + shift(i);
    }
    chain.emplace_back(x.data(), x.data() + m);
  }
  return chain;
}

RateReport rate_report(const DiffusionModel& model, Scheme scheme, int m,
                       double T) {
  RateReport r;
  r.scheme = scheme;
  r.m = m;
  r.T = T;
  r.delta = T / (m + 1);
  r.c_delta = partial_corr(model, r.delta);
  r.lambda_max = lambda_max_A(m, r.c_delta);
  r.rho = convergence_rate(scheme, m, r.c_delta);
  r.relaxation_time = relaxation_time(r.rho);
  return r;
}

}  // namespace bridgeblock

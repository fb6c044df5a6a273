#include "bridgeblock/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bridgeblock {

namespace {

double gaussian_density(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

DiffusionModel DiffusionModel::scaled_bm(double sigma, double mu) {
  if (sigma <= 0.0) throw std::invalid_argument("scaled_bm: sigma must be > 0");
  DiffusionModel m;
  m.kind_ = ModelKind::ScaledBM;
  m.sigma_ = sigma;
  m.mu_ = mu;
  const double alpha = mu / sigma;
  m.phi_lb_ = 0.5 * alpha * alpha;  // phi is constant
  m.phi_ub_ = m.phi_lb_;
  return m;
}

DiffusionModel DiffusionModel::ou(double theta, double sigma) {
  if (sigma <= 0.0 || theta <= 0.0)
    throw std::invalid_argument("ou: theta and sigma must be > 0");
  DiffusionModel m;
  m.kind_ = ModelKind::OU;
  m.sigma_ = sigma;
  m.theta_ = theta;
  m.phi_lb_ = -0.5 * theta;  // min of (theta^2 y^2 - theta) / 2 at y = 0
  return m;
}

DiffusionModel DiffusionModel::sine(double a, double b, double omega,
                                    double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("sine: sigma must be > 0");
  DiffusionModel m;
  m.kind_ = ModelKind::Sine;
  m.sigma_ = sigma;
  m.a_ = a;
  m.b_ = b;
  m.omega_ = omega;
  m.compute_sine_phi_bounds();
  return m;
}

std::string DiffusionModel::name() const {
  switch (kind_) {
    case ModelKind::ScaledBM: return "scaled_bm";
    case ModelKind::OU: return "ou";
    case ModelKind::Sine: return "sine";
  }
  return "?";
}

double DiffusionModel::drift_original(double x) const {
  switch (kind_) {
    case ModelKind::ScaledBM: return mu_;
    case ModelKind::OU: return -theta_ * x;
    case ModelKind::Sine: return a_ - b_ * std::sin(omega_ * x);
  }
  return 0.0;
}

double DiffusionModel::drift(double y) const {
  return drift_original(sigma_ * y) / sigma_;
}

double DiffusionModel::drift_deriv(double y) const {
  switch (kind_) {
    case ModelKind::ScaledBM: return 0.0;
    case ModelKind::OU: return -theta_;
    case ModelKind::Sine:
      return -b_ * omega_ * std::cos(omega_ * sigma_ * y);
  }
  return 0.0;
}

double DiffusionModel::potential(double y) const {
  switch (kind_) {
    case ModelKind::ScaledBM: return (mu_ / sigma_) * y;
    case ModelKind::OU: return -0.5 * theta_ * y * y;
    case ModelKind::Sine: {
      const double x = sigma_ * y;
      return (a_ * x + (b_ / omega_) * std::cos(omega_ * x)) / (sigma_ * sigma_);
    }
  }
  return 0.0;
}

double DiffusionModel::phi(double y) const {
  const double al = drift(y);
  return 0.5 * (al * al + drift_deriv(y));
}

void DiffusionModel::compute_sine_phi_bounds() {
  // phi is periodic in y with period 2*pi / (omega * sigma); minimize and
  // maximize on a dense grid over one period, then widen by a margin bounded
  // by the local slope so the cached values bracket the true extrema.
  const double period = 2.0 * std::numbers::pi / (omega_ * sigma_);
  const int n = 1 << 20;
  const double h = period / n;
  double lo = phi(0.0), hi = lo, max_slope = 0.0;
  double prev = lo;
  for (int i = 1; i <= n; ++i) {
    const double v = phi(i * h);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    max_slope = std::max(max_slope, std::abs(v - prev) / h);
    prev = v;
  }
  phi_lb_ = lo - 0.5 * max_slope * h;
  phi_ub_ = hi + 0.5 * max_slope * h;
}

double DiffusionModel::transition_density(double t, double x0, double xt) const {
  if (t <= 0.0) throw std::invalid_argument("transition_density: t must be > 0");
  switch (kind_) {
    case ModelKind::ScaledBM:
      return gaussian_density(xt, x0 + mu_ * t, sigma_ * sigma_ * t);
    case ModelKind::OU: {
      const double e = std::exp(-theta_ * t);
      const double var = sigma_ * sigma_ * (1.0 - e * e) / (2.0 * theta_);
      return gaussian_density(xt, x0 * e, var);
    }
    case ModelKind::Sine:
      throw UnsupportedModel("transition_density: no closed form for sine model");
  }
  return 0.0;
}

double DiffusionModel::transition_density_reduced(double t, double y0,
                                                  double yt) const {
  // Y = X / sigma, so p^Y_t(y0, yt) = sigma * p^X_t(sigma y0, sigma yt).
  return sigma_ * transition_density(t, sigma_ * y0, sigma_ * yt);
}

}  // namespace bridgeblock

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bridgeblock {

enum class ModelKind { ScaledBM, OU, Sine };

struct UnsupportedModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundedPhi : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar diffusion dX = b(X) dt + sigma dW.  The samplers operate on the
// unit-volatility (Lamperti) reduction Y = X / sigma, whose drift is
// alpha(y) = b(sigma * y) / sigma.  Public endpoints and transition densities
// are in original coordinates; drift/phi/potential are functions of the
// reduced coordinate y.
class DiffusionModel {
public:
  static DiffusionModel scaled_bm(double sigma, double mu = 0.0);
  static DiffusionModel ou(double theta, double sigma);
  static DiffusionModel sine(double a = 2.0, double b = 2.0, double omega = 8.0,
                             double sigma = 0.5);

  ModelKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double mu() const { return mu_; }
  double theta() const { return theta_; }
  int dim() const { return 1; }
  std::string name() const;

  // Drift of the original SDE, b(x).
  double drift_original(double x) const;

  // Drift of the reduced process, alpha(y) = b(sigma y) / sigma.
  double drift(double y) const;
  double drift_deriv(double y) const;

  // Potential A with A' = alpha (reduced coordinates).
  double potential(double y) const;

  // phi(y) = (alpha(y)^2 + alpha'(y)) / 2
  double phi(double y) const;

  // Phi = inf phi (closed form for BM/OU, cached grid minimum for Sine).
  double phi_lower_bound() const { return phi_lb_; }

  // sup phi when finite (BM: phi is constant; Sine: periodic drift).
  // OU has unbounded phi, so no value.
  std::optional<double> phi_upper_bound() const { return phi_ub_; }

  bool has_transition_density() const { return kind_ != ModelKind::Sine; }

  // Transition density p_t(x0, xt) in original coordinates.
  double transition_density(double t, double x0, double xt) const;

  // Same density for the reduced process Y = X / sigma.
  double transition_density_reduced(double t, double y0, double yt) const;

  double to_reduced(double x) const { return x / sigma_; }
  double to_original(double y) const { return y * sigma_; }

private:
  DiffusionModel() = default;
  void compute_sine_phi_bounds();

  ModelKind kind_ = ModelKind::ScaledBM;
  double sigma_ = 1.0;
  double mu_ = 0.0;    // ScaledBM drift
  double theta_ = 0.0; // OU mean reversion
  double a_ = 2.0, b_ = 2.0, omega_ = 8.0; // Sine drift b(x) = a - b sin(omega x)
  double phi_lb_ = 0.0;
  std::optional<double> phi_ub_;
};

}  // namespace bridgeblock

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "bridgeblock/blocking.hpp"
#include "bridgeblock/models.hpp"
#include "bridgeblock/rng.hpp"

namespace bridgeblock {

struct RateNotLessThanOne : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidRate : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericallySingular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cov[(Y_s, Y_t) | Y_0, Y_T] for the OU process, written with exp-difference
// forms so large theta*T does not overflow.
Eigen::Matrix2d conditional_cov_ou(double s, double t, double T, double theta,
                                   double sigma);

// Partial correlation c(delta) = Corr(X_delta, X_{2 delta} | X_0, X_{3 delta}).
// Exactly 1/2 for scaled BM; closed form for OU.
double partial_corr(const DiffusionModel& model, double delta);

// Symmetric tridiagonal Toeplitz matrix with zero diagonal, off-diagonal c.
Eigen::MatrixXd build_matrix_A(int m, double c);

// Analytic spectrum of that matrix: -2c cos(pi l / (m+1)), l = 1..m.
std::vector<double> toeplitz_spectrum(int m, double c);
double lambda_max_A(int m, double c);

// L2-convergence rate of a Gibbs sweep.  Checkerboard/Lexicographic:
// 4 c^2 cos^2(pi/(m+1)); Random: [(m - 1 + 2|c| cos(pi/(m+1))) / m]^m.
double convergence_rate(Scheme scheme, int m, double c);

// -1 / log(rho); rho <= 0 is treated as instantaneous mixing (returns 0).
double relaxation_time(double rho);

// m * C_rej(2 delta) with the sampler's bridges anchored at x0 = xT = 0.
double cost_sweep(double T, int m, const DiffusionModel& model);

// relaxation_time(rate) * cost_sweep.
double cost_blocking(double T, int m, const DiffusionModel& model,
                     Scheme scheme);

// ceil(c1 * T^(1 + chi1)); defaults give delta approximately 0.1.
int optimal_num_knots(double T, double c1 = 10.0, double chi1 = 0.0);

struct GaussianKnotLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd precision;
};

// Conditional law of the knot vector (X_{k_1}, ..., X_{k_m}) given
// X_0 = x0, X_T = xT, for the Gaussian models.
GaussianKnotLaw knot_law_gaussian(const DiffusionModel& model, double x0,
                                  double xT, double T,
                                  const std::vector<double>& anchors);

// Affine one-sweep map G -> B G + eps, eps ~ N(b, V), built by composing the
// per-block conditional-mean updates in sweep order.
struct SweepKernel {
  Eigen::MatrixXd B;
  Eigen::VectorXd b;
};
SweepKernel gibbs_kernel_B(const GaussianKnotLaw& law, Scheme scheme);

double spectral_radius_power(const Eigen::MatrixXd& M, int max_iters = 20000,
                             double tol = 1e-12);

// Knot-only Gibbs chain (no path simulation), one row per sweep.
std::vector<std::vector<double>> simulate_knot_chain(const GaussianKnotLaw& law,
                                                     Scheme scheme,
                                                     long n_sweeps,
                                                     RngStream& rng);

struct RateReport {
  Scheme scheme;
  int m = 1;
  double T = 1.0;
  double delta = 0.0;
  double c_delta = 0.0;
  double lambda_max = 0.0;
  double rho = 0.0;
  double relaxation_time = 0.0;
};

RateReport rate_report(const DiffusionModel& model, Scheme scheme, int m,
                       double T);

}  // namespace bridgeblock

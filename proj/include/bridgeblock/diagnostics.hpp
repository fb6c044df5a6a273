#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace bridgeblock {

struct DegenerateSeries : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSignal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Biased (divide-by-N) autocorrelation estimates rho_0..rho_max_lag.
std::vector<double> autocorrelation(std::span<const double> series,
                                    int max_lag);

// Effective sample size, N / (1 + 2 sum rho_l), with the sum truncated at the
// first negative adjacent-pair sum (initial positive sequence rule).
// Clamped to [1, N].
double ess(std::span<const double> series);

// ess / elapsed_seconds: independent draws per second.
double taess(std::span<const double> series, double elapsed_seconds);

// Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Asymptotic two-sample critical value at level alpha.
double ks_critical_value(std::size_t na, std::size_t nb, double alpha);

// Geometric decay rate fitted to log |rho_l| over lags above the 0.05 noise
// floor (least squares), exponentiated.
double fit_geometric_rate(std::span<const double> autocorr);

}  // namespace bridgeblock

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bridgeblock {

// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection.
// Dependency-free on purpose: serves as a brute-force cross-check for the
// closed-form Toeplitz spectrum, so it must not share code with it.
//
// diag has size n, off has size n-1.  Returns eigenvalues in ascending order.
inline std::vector<double> tridiag_eigenvalues(const std::vector<double>& diag,
                                               const std::vector<double>& off,
                                               double tol = 1e-13) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 != n)
    throw std::invalid_argument("tridiag_eigenvalues: off size must be n-1");

  // Count of eigenvalues strictly below x (Sturm sequence via the
  // shifted LDL^T recurrence).
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double off2 = (i == 0) ? 0.0 : off[i - 1] * off[i - 1];
      d = diag[i] - x - off2 / d;
      if (d == 0.0) d = -std::numeric_limits<double>::min();
      if (d < 0.0) ++count;
    }
    return count;
  };

  // Gershgorin bounds
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  lo -= 1.0;
  hi += 1.0;

  std::vector<double> eig(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo, b = hi;
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      const double mid = 0.5 * (a + b);
      if (count_below(mid) <= k)
        a = mid;
      else
        b = mid;
    }
    eig[k] = 0.5 * (a + b);
  }
  return eig;
}

}  // namespace bridgeblock

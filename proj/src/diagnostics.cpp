#include "bridgeblock/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bridgeblock {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // divide-by-N
};

Moments moments(std::span<const double> s) {
  Moments m;
  m.mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
  for (double v : s) m.var += (v - m.mean) * (v - m.mean);
  m.var /= s.size();
  return m;
}

double autocov(std::span<const double> s, double mean, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t i = 0; i + lag < s.size(); ++i)
    acc += (s[i] - mean) * (s[i + lag] - mean);
  return acc / s.size();
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> series,
                                    int max_lag) {
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= series.size() / 2)
    throw std::invalid_argument("autocorrelation: max_lag must be < N/2");
  const Moments m = moments(series);
  if (m.var == 0.0)
    throw DegenerateSeries("autocorrelation: series has zero variance");
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (int l = 1; l <= max_lag; ++l)
    rho[l] = autocov(series, m.mean, l) / m.var;
  return rho;
}

double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw std::invalid_argument("ess: need at least 4 samples");
  const Moments m = moments(series);
  if (m.var == 0.0) throw DegenerateSeries("ess: series has zero variance");
  double acc = 0.0;
  for (std::size_t lag = 1; lag + 1 < n / 2; lag += 2) {
    const double pair = autocov(series, m.mean, lag) / m.var +
                        autocov(series, m.mean, lag + 1) / m.var;
    if (pair < 0.0) break;
    acc += pair;
  }
  const double e = n / (1.0 + 2.0 * acc);
  return std::clamp(e, 1.0, static_cast<double>(n));
}

double taess(std::span<const double> series, double elapsed_seconds) {
  if (elapsed_seconds <= 0.0)
    throw std::invalid_argument("taess: elapsed_seconds must be > 0");
  return ess(series) / elapsed_seconds;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    // consume every copy of the current smallest value on both sides so
    // tied observations do not create a spurious step difference
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    const double fa = static_cast<double>(i) / sa.size();
    const double fb = static_cast<double>(j) / sb.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_critical_value(std::size_t na, std::size_t nb, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(na + nb) /
                       (static_cast<double>(na) * static_cast<double>(nb)));
}

double fit_geometric_rate(std::span<const double> autocorr) {
  // Retain lags 1..L while rho stays above the noise floor.
  std::vector<double> xs, ys;
  for (std::size_t l = 1; l < autocorr.size(); ++l) {
    if (autocorr[l] <= 0.05) break;
    xs.push_back(static_cast<double>(l));
    ys.push_back(std::log(autocorr[l]));
  }
  if (xs.size() < 3)
    throw InsufficientSignal("fit_geometric_rate: fewer than 3 usable lags");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double rate = std::exp(sxy / sxx);
  return std::clamp(rate, 0.0, std::nextafter(1.0, 0.0));
}

}  // namespace bridgeblock

#include "bridgeblock/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bridgeblock {

std::vector<double> make_mesh(double ta, double tb, const MeshSpec& mesh) {
  if (tb <= ta) throw DegenerateInterval("make_mesh: tb must exceed ta");
  if (mesh.h <= 0.0) throw std::invalid_argument("make_mesh: h must be > 0");
  const double len = tb - ta;
  const int n = std::max(1, static_cast<int>(std::ceil(len / mesh.h)));
  std::vector<double> times(n + 1);
  for (int i = 0; i <= n; ++i) times[i] = ta + len * i / n;
  times.back() = tb;
  return times;
}

Path sample_brownian_bridge_at(std::span<const double> times, double x0,
                               double xT, RngStream& rng) {
  if (times.size() < 2 || times.back() <= times.front())
    throw DegenerateInterval("sample_brownian_bridge_at: bad time grid");
  Path p;
  p.times.assign(times.begin(), times.end());
  p.values.resize(times.size());
  p.values.front() = x0;
  p.values.back() = xT;
  const double tb = times.back();
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double t0 = times[i - 1], t1 = times[i];
    const double prev = p.values[i - 1];
    // conditional on (t0, prev) and (tb, xT)
    const double w = (t1 - t0) / (tb - t0);
    const double mean = prev + w * (xT - prev);
    const double var = (t1 - t0) * (tb - t1) / (tb - t0);
    p.values[i] = mean + std::sqrt(var) * rng.normal();
  }
  return p;
}

Path sample_brownian_bridge(double x0, double xT, double ta, double tb,
                            const MeshSpec& mesh, RngStream& rng) {
  return sample_brownian_bridge_at(make_mesh(ta, tb, mesh), x0, xT, rng);
}

namespace {

// Trapezoid quadrature of (phi - Phi) along reduced-coordinate values.
double log_accept_reduced(std::span<const double> times,
                          std::span<const double> yvals,
                          const DiffusionModel& model) {
  const double lb = model.phi_lower_bound();
  double integral = 0.0;
  double prev = model.phi(yvals[0]) - lb;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double cur = model.phi(yvals[i]) - lb;
    integral += 0.5 * (prev + cur) * (times[i] - times[i - 1]);
    prev = cur;
  }
  return std::min(0.0, -integral);
}

}  // namespace

double log_accept_prob_approx(const Path& path, const DiffusionModel& model) {
  std::vector<double> y(path.values.size());
  std::transform(path.values.begin(), path.values.end(), y.begin(),
                 [&](double x) { return model.to_reduced(x); });
  return log_accept_reduced(path.times, y, model);
}

Path sample_bridge_rejection(const DiffusionModel& model, double x0, double xT,
                             double ta, double tb, const MeshSpec& mesh,
                             RngStream& rng, long max_proposals) {
  return sample_bridge_rejection_at(model, make_mesh(ta, tb, mesh), x0, xT, rng,
                                    max_proposals);
}

Path sample_bridge_rejection_at(const DiffusionModel& model,
                                std::span<const double> times, double x0,
                                double xT, RngStream& rng, long max_proposals) {
  const double y0 = model.to_reduced(x0), yT = model.to_reduced(xT);
  for (long trial = 1; trial <= max_proposals; ++trial) {
    Path cand = sample_brownian_bridge_at(times, y0, yT, rng);
    const double logp = log_accept_reduced(cand.times, cand.values, model);
    if (std::log(rng.uniform()) <= logp) {
      for (double& v : cand.values) v = model.to_original(v);
      cand.proposals_used = trial;
      cand.variant = PathVariant::Approximate;
      return cand;
    }
  }
  throw BudgetExceeded("sample_bridge_rejection: proposal budget exhausted",
                       max_proposals);
}

Path sample_bridge_exact(const DiffusionModel& model, double x0, double xT,
                         double ta, double tb, RngStream& rng,
                         std::span<const double> extra_times,
                         long max_proposals) {
  if (tb <= ta) throw DegenerateInterval("sample_bridge_exact: tb must exceed ta");
  const auto ub = model.phi_upper_bound();
  if (!ub)
    throw UnboundedPhi("sample_bridge_exact: phi unbounded above for model " +
                       model.name());
  const double big_m = *ub - model.phi_lower_bound();
  const double y0 = model.to_reduced(x0), yT = model.to_reduced(xT);
  const double lb = model.phi_lower_bound();

  for (long trial = 1; trial <= max_proposals; ++trial) {
    const long kappa = rng.poisson(big_m * (tb - ta));
    std::vector<double> ts(static_cast<std::size_t>(kappa));
    std::vector<double> marks(static_cast<std::size_t>(kappa));
    for (long i = 0; i < kappa; ++i) {
      ts[i] = ta + (tb - ta) * rng.uniform();
      marks[i] = big_m * rng.uniform();
    }
    // Instantiate the proposal at Poisson points plus requested times.
    std::vector<double> grid;
    grid.reserve(ts.size() + extra_times.size() + 2);
    grid.push_back(ta);
    grid.insert(grid.end(), ts.begin(), ts.end());
    grid.insert(grid.end(), extra_times.begin(), extra_times.end());
    grid.push_back(tb);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    Path cand = sample_brownian_bridge_at(grid, y0, yT, rng);
    bool accepted = true;
    for (long i = 0; i < kappa && accepted; ++i) {
      const auto it =
          std::lower_bound(cand.times.begin(), cand.times.end(), ts[i]);
      const double y = cand.values[it - cand.times.begin()];
      accepted = marks[i] > model.phi(y) - lb;
    }
    if (accepted) {
      for (double& v : cand.values) v = model.to_original(v);
      cand.proposals_used = trial;
      cand.variant = PathVariant::Exact;
      return cand;
    }
  }
  throw BudgetExceeded("sample_bridge_exact: proposal budget exhausted",
                       max_proposals);
}

double expected_accept_prob(const DiffusionModel& model, double T, double x0,
                            double xT) {
  if (!model.has_transition_density())
    throw UnsupportedModel(
        "expected_accept_prob: no closed-form transition density for " +
        model.name());
  const double y0 = model.to_reduced(x0), yT = model.to_reduced(xT);
  const double p = model.transition_density_reduced(T, y0, yT);
  const double q = std::exp(-0.5 * (yT - y0) * (yT - y0) / T) /
                   std::sqrt(2.0 * std::numbers::pi * T);
  const double c7 = std::exp(model.potential(y0) - model.potential(yT));
  return std::min(1.0, c7 * (p / q) * std::exp(model.phi_lower_bound() * T));
}

double expected_cost_rej(const DiffusionModel& model, double T, double x0,
                         double xT) {
  return T / expected_accept_prob(model, T, x0, xT);
}

}  // namespace bridgeblock

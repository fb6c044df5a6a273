#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "bridgeblock/models.hpp"
#include "bridgeblock/rng.hpp"

namespace bridgeblock {

enum class PathVariant { Approximate, Exact };

// A bridge trajectory on [times.front(), times.back()].
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  long proposals_used = 1;
  PathVariant variant = PathVariant::Approximate;
};

// Constant-width mesh; actual spacing is (tb - ta) / ceil((tb - ta) / h) <= h.
struct MeshSpec {
  double h = 1e-3;
};

struct DegenerateInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded(std::string msg, long budget)
      : std::runtime_error(std::move(msg)), budget(budget) {}
  long budget;
};

inline constexpr long kDefaultProposalBudget = 10'000'000;

std::vector<double> make_mesh(double ta, double tb, const MeshSpec& mesh);

// Brownian bridge pinned at (ta, x0) and (tb, xT), sampled sequentially
// left-to-right at the given interior times.
Path sample_brownian_bridge_at(std::span<const double> times, double x0,
                               double xT, RngStream& rng);
Path sample_brownian_bridge(double x0, double xT, double ta, double tb,
                            const MeshSpec& mesh, RngStream& rng);

// log p(Y) = -integral of (phi(Y_t) - Phi) dt, trapezoid rule on the path
// mesh.  Path values are in original coordinates.
double log_accept_prob_approx(const Path& path, const DiffusionModel& model);

// Approximate path-space rejection sampler: Brownian-bridge proposals on a
// mesh, accepted with probability exp(log_accept_prob_approx).
Path sample_bridge_rejection(const DiffusionModel& model, double x0, double xT,
                             double ta, double tb, const MeshSpec& mesh,
                             RngStream& rng,
                             long max_proposals = kDefaultProposalBudget);

// Same sampler on a caller-supplied time grid.
Path sample_bridge_rejection_at(const DiffusionModel& model,
                                std::span<const double> times, double x0,
                                double xT, RngStream& rng,
                                long max_proposals = kDefaultProposalBudget);

// Exact variant via Poisson thinning; needs phi bounded above.  The returned
// path holds the accepted skeleton (plus any extra_times the caller needs
// instantiated, e.g. anchor points) and carries no mesh bias.
Path sample_bridge_exact(const DiffusionModel& model, double x0, double xT,
                         double ta, double tb, RngStream& rng,
                         std::span<const double> extra_times = {},
                         long max_proposals = kDefaultProposalBudget);

// Expected acceptance probability of the rejection sampler,
// E[p] = exp{A(y0) - A(yT)} * (p_T / q_T) * exp{Phi T} in reduced
// coordinates, with q the Brownian proposal transition density.
double expected_accept_prob(const DiffusionModel& model, double T, double x0,
                            double xT);

// Expected cost of one accepted draw, T / E[p], in relative units.
double expected_cost_rej(const DiffusionModel& model, double T, double x0,
                         double xT);

}  // namespace bridgeblock

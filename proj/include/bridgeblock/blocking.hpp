#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bridgeblock/bridge.hpp"
#include "bridgeblock/models.hpp"
#include "bridgeblock/rng.hpp"

namespace bridgeblock {

enum class Scheme { Checkerboard, Lexicographic, Random };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct Interval {
  double a = 0.0, b = 0.0;
  int anchor = 0;  // index (0-based) of the single interior anchor
};

// One update group: the intervals resampled together (conditionally
// independent given the complementary knots).
struct Block {
  std::vector<Interval> intervals;
};

// Anchors k_1..k_m on an equidistant grid, the scheme's anchor partition and
// the derived block intervals.
struct BlockingLayout {
  double T = 1.0;
  int m = 1;
  Scheme scheme = Scheme::Checkerboard;
  std::vector<double> anchors;                 // size m, k_i = i T / (m+1)
  std::vector<std::vector<int>> partition;     // A_i as 0-based anchor indices
  std::vector<Block> blocks;                   // B_i, same indexing as partition
  double delta() const { return T / (m + 1); }
};

BlockingLayout build_layout(double T, int m, Scheme scheme);

// Full trajectory plus the knot view used by the Gibbs sweeps.
struct BlockedState {
  BlockingLayout layout;
  Path path;
  std::vector<std::size_t> anchor_index;  // position of each anchor in path.times
  std::vector<double> knots;              // values at anchors
  long sweep_index = 0;
  PathVariant variant = PathVariant::Approximate;
};

Path initialize_path(double x0, double xT, double T,
                     const BlockingLayout& layout, const MeshSpec& mesh);

BlockedState make_blocked_state(double x0, double xT,
                                const BlockingLayout& layout,
                                const MeshSpec& mesh,
                                PathVariant variant = PathVariant::Approximate);

// One Gibbs sweep of the blocked sampler.  Checkerboard: both half-sweeps;
// Lexicographic: knots in temporal order; Random: m uniform picks.
void gibbs_sweep(BlockedState& state, const DiffusionModel& model,
                 const MeshSpec& mesh, RngStream& rng,
                 long max_proposals = kDefaultProposalBudget);

struct KnotChain {
  std::vector<std::vector<double>> knots;  // one row per sweep
  std::vector<double> sweep_seconds;       // wall clock per sweep
  std::vector<long> proposals;             // bridge proposals per sweep
  double total_seconds = 0.0;
  std::string error;  // nonempty if the run stopped early
};

using SweepRecorder =
    std::function<void(long sweep, const std::vector<double>& knots,
                       double elapsed_seconds)>;

KnotChain run_blocked_sampler(const DiffusionModel& model, double x0, double xT,
                              const BlockingLayout& layout, long n_sweeps,
                              const MeshSpec& mesh, RngStream& rng,
                              const SweepRecorder& recorder = {},
                              PathVariant variant = PathVariant::Approximate,
                              long max_proposals = kDefaultProposalBudget);

}  // namespace bridgeblock

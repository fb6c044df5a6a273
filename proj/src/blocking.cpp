#include "bridgeblock/blocking.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace bridgeblock {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Checkerboard: return "checkerboard";
    case Scheme::Lexicographic: return "lexicographic";
    case Scheme::Random: return "random";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "checkerboard") return Scheme::Checkerboard;
  if (name == "lexicographic") return Scheme::Lexicographic;
  if (name == "random") return Scheme::Random;
  throw std::invalid_argument("unknown scheme: " + name);
}

BlockingLayout build_layout(double T, int m, Scheme scheme) {
  if (m < 1 || T <= 0.0)
    throw std::invalid_argument("build_layout: need m >= 1 and T > 0");
  BlockingLayout layout;
  layout.T = T;
  layout.m = m;
  layout.scheme = scheme;
  layout.anchors.resize(m);
  for (int i = 0; i < m; ++i) layout.anchors[i] = T * (i + 1) / (m + 1);

  if (scheme == Scheme::Checkerboard && m >= 2) {
    // Two interlaced sets: odd-numbered anchors k_1, k_3, ... then even.
    layout.partition.resize(2);
    for (int i = 0; i < m; ++i) layout.partition[i % 2].push_back(i);
  } else {
    // Single-anchor groups (and the degenerate checkerboard with m = 1).
    layout.partition.resize(scheme == Scheme::Checkerboard ? 1 : m);
    for (int i = 0; i < static_cast<int>(layout.partition.size()); ++i)
      layout.partition[i].push_back(scheme == Scheme::Checkerboard ? 0 : i);
  }

  // Each updated anchor sits in the interval bounded by its neighbouring
  // conditioning anchors (or the endpoints): (k_{i-1}, k_{i+1}).
  layout.blocks.resize(layout.partition.size());
  for (std::size_t g = 0; g < layout.partition.size(); ++g) {
    for (int i : layout.partition[g]) {
      Interval iv;
      iv.a = (i == 0) ? 0.0 : layout.anchors[i - 1];
      iv.b = (i == m - 1) ? T : layout.anchors[i + 1];
      iv.anchor = i;
      layout.blocks[g].intervals.push_back(iv);
    }
  }
  return layout;
}

Path initialize_path(double x0, double xT, double T,
                     const BlockingLayout& layout, const MeshSpec& mesh) {
  // Global grid: a constant-width mesh per inter-anchor interval, so that
  // every anchor is a grid point and block segments align with the grid.
  std::vector<double> boundaries;
  boundaries.push_back(0.0);
  boundaries.insert(boundaries.end(), layout.anchors.begin(),
                    layout.anchors.end());
  boundaries.push_back(T);

  Path p;
  p.times.push_back(0.0);
  for (std::size_t j = 0; j + 1 < boundaries.size(); ++j) {
    const auto seg = make_mesh(boundaries[j], boundaries[j + 1], mesh);
    p.times.insert(p.times.end(), seg.begin() + 1, seg.end());
  }
  p.values.resize(p.times.size());
  for (std::size_t i = 0; i < p.times.size(); ++i)
    p.values[i] = x0 + (xT - x0) * p.times[i] / T;
  p.values.front() = x0;
  p.values.back() = xT;
  return p;
}

BlockedState make_blocked_state(double x0, double xT,
                                const BlockingLayout& layout,
                                const MeshSpec& mesh, PathVariant variant) {
  BlockedState state;
  state.layout = layout;
  state.variant = variant;
  if (variant == PathVariant::Approximate) {
    state.path = initialize_path(x0, xT, layout.T, layout, mesh);
  } else {
    // The exact sampler keeps only endpoint and anchor values.
    state.path.times.push_back(0.0);
    state.path.times.insert(state.path.times.end(), layout.anchors.begin(),
                            layout.anchors.end());
    state.path.times.push_back(layout.T);
    state.path.values.resize(state.path.times.size());
    for (std::size_t i = 0; i < state.path.times.size(); ++i)
      state.path.values[i] =
          x0 + (xT - x0) * state.path.times[i] / layout.T;
    state.path.variant = PathVariant::Exact;
  }
  state.anchor_index.resize(layout.anchors.size());
  for (std::size_t i = 0; i < layout.anchors.size(); ++i) {
    const auto it = std::lower_bound(state.path.times.begin(),
                                     state.path.times.end(),
                                     layout.anchors[i] - 1e-12);
    state.anchor_index[i] = static_cast<std::size_t>(it - state.path.times.begin());
    state.path.times[state.anchor_index[i]] = layout.anchors[i];
  }
  state.knots.resize(layout.anchors.size());
  for (std::size_t i = 0; i < layout.anchors.size(); ++i)
    state.knots[i] = state.path.values[state.anchor_index[i]];
  return state;
}

namespace {

// Resample one block interval in place, conditioned on its end values.
// Returns the number of bridge proposals consumed.
long update_interval(BlockedState& state, const Interval& iv,
                     const DiffusionModel& model, RngStream& rng,
                     long max_proposals) {
  auto& path = state.path;
  const auto begin_it =
      std::lower_bound(path.times.begin(), path.times.end(), iv.a - 1e-12);
  const auto end_it =
      std::lower_bound(path.times.begin(), path.times.end(), iv.b - 1e-12);
  const std::size_t ia = static_cast<std::size_t>(begin_it - path.times.begin());
  const std::size_t ib = static_cast<std::size_t>(end_it - path.times.begin());

  if (state.variant == PathVariant::Approximate) {
    std::span<const double> seg(path.times.data() + ia, ib - ia + 1);
    Path draw = sample_bridge_rejection_at(model, seg, path.values[ia],
                                           path.values[ib], rng, max_proposals);
    std::copy(draw.values.begin() + 1, draw.values.end() - 1,
              path.values.begin() + ia + 1);
    state.knots[iv.anchor] = path.values[state.anchor_index[iv.anchor]];
    return draw.proposals_used;
  }

  const double anchor_t = state.layout.anchors[iv.anchor];
  const double extra[] = {anchor_t};
  Path draw = sample_bridge_exact(model, path.values[ia], path.values[ib], iv.a,
                                  iv.b, rng, extra, max_proposals);
  const auto at = std::lower_bound(draw.times.begin(), draw.times.end(),
                                   anchor_t - 1e-12);
  const double knot = draw.values[at - draw.times.begin()];
  path.values[state.anchor_index[iv.anchor]] = knot;
  state.knots[iv.anchor] = knot;
  return draw.proposals_used;
}

}  // namespace

void gibbs_sweep(BlockedState& state, const DiffusionModel& model,
                 const MeshSpec& /*mesh*/, RngStream& rng, long max_proposals) {
  const auto& layout = state.layout;
  const std::size_t n_groups = layout.blocks.size();
  RngStream picks = rng.fork(state.sweep_index, 0x9e3779b9ULL);
  long counter = 0;
  for (std::size_t step = 0; step < n_groups; ++step) {
    std::size_t g = step;
    if (layout.scheme == Scheme::Random)
      g = picks.uniform_index(layout.blocks.size());
    for (const Interval& iv : layout.blocks[g].intervals) {
      RngStream stream = rng.fork(state.sweep_index, counter++);
      try {
        state.path.proposals_used +=
            update_interval(state, iv, model, stream, max_proposals);
      } catch (const BudgetExceeded& e) {
        throw BudgetExceeded("sweep " + std::to_string(state.sweep_index) +
                                 ", block anchor k_" +
                                 std::to_string(iv.anchor + 1) + ": " + e.what(),
                             e.budget);
      }
    }
  }
  ++state.sweep_index;
}

KnotChain run_blocked_sampler(const DiffusionModel& model, double x0, double xT,
                              const BlockingLayout& layout, long n_sweeps,
                              const MeshSpec& mesh, RngStream& rng,
                              const SweepRecorder& recorder, PathVariant variant,
                              long max_proposals) {
  if (n_sweeps < 1)
    throw std::invalid_argument("run_blocked_sampler: n_sweeps must be >= 1");
  BlockedState state = make_blocked_state(x0, xT, layout, mesh, variant);
  KnotChain chain;
  chain.knots.reserve(n_sweeps);
  chain.sweep_seconds.reserve(n_sweeps);
  using clock = std::chrono::steady_clock;
  for (long n = 0; n < n_sweeps; ++n) {
    const long before = state.path.proposals_used;
    const auto t0 = clock::now();
    try {
      gibbs_sweep(state, model, mesh, rng, max_proposals);
    } catch (const BudgetExceeded& e) {
      chain.error = e.what();
      return chain;
    }
    const double secs =
        std::chrono::duration<double>(clock::now() - t0).count();
    chain.total_seconds += secs;
    chain.knots.push_back(state.knots);
    chain.sweep_seconds.push_back(secs);
    chain.proposals.push_back(state.path.proposals_used - before);
    if (recorder) recorder(state.sweep_index, state.knots, chain.total_seconds);
  }
  return chain;
}

}  // namespace bridgeblock

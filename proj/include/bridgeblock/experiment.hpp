#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bridgeblock/blocking.hpp"
#include "bridgeblock/models.hpp"

namespace bridgeblock {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { CostPerSweep, TaessVsDelta, CostVsT };
ExperimentKind experiment_kind_from_name(const std::string& name);

// Declarative run description (parsed from a JSON config file).
struct ExperimentConfig {
  DiffusionModel model = DiffusionModel::scaled_bm(1.0);
  double x0 = 0.0;
  double xT = 0.0;
  std::vector<double> T_grid = {1.0};
  std::vector<int> m_grid;          // empty means unblocked (sample) or rule
  double c1 = 10.0, chi1 = 0.0;     // optimal-m rule
  Scheme scheme = Scheme::Checkerboard;
  long n_sweeps = 1000;
  long burn_in = -1;                // -1: auto
  double mesh_h = 1e-3;
  PathVariant variant = PathVariant::Approximate;
  std::uint64_t seed = 1;
  long max_proposals = kDefaultProposalBudget;
  std::string out_dir = ".";
  std::uint64_t config_hash = 0;
};

// Parses the JSON config; BRIDGEBLOCK_OUT_DIR overrides out_dir if set.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

long effective_burn_in(const ExperimentConfig& cfg, double T, int m);

// One grid-cell result of an experiment run.
struct ExperimentCell {
  double T = 0.0;
  int m = 0;
  double delta = 0.0;
  long sweeps = 0;
  double seconds = 0.0;
  double sec_per_sweep = 0.0;
  double proposals_per_sweep = 0.0;
  double ess = 0.0;
  double taess = 0.0;
  double fitted_rate = 0.0;    // NaN when unavailable
  double analytic_rate = 0.0;  // NaN when unavailable
  std::string error;
};

struct ExperimentRecord {
  ExperimentKind kind = ExperimentKind::TaessVsDelta;
  std::vector<ExperimentCell> cells;
  double cost_slope = 0.0;  // CostVsT only: slope of log(1/taESS) vs log T
};

ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                ExperimentKind kind);

// CLI entry points; return process exit codes (0 ok, 2 config, 3 budget,
// 4 numerical failure).
int cmd_sample(const ExperimentConfig& cfg, std::ostream& log);
int cmd_rates(const ExperimentConfig& cfg, std::ostream& log);
int cmd_experiment(const ExperimentConfig& cfg, ExperimentKind kind,
                   std::ostream& log);

}  // namespace bridgeblock

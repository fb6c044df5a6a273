#include "bridgeblock/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bridgeblock/analysis.hpp"
#include "bridgeblock/diagnostics.hpp"

namespace bridgeblock {

using nlohmann::json;

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "cost_per_sweep") return ExperimentKind::CostPerSweep;
  if (name == "taess_vs_delta") return ExperimentKind::TaessVsDelta;
  if (name == "cost_vs_t") return ExperimentKind::CostVsT;
  throw ConfigError("unknown experiment kind: " + name);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

DiffusionModel model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scaled_bm")
    return DiffusionModel::scaled_bm(j.value("sigma", 1.0), j.value("mu", 0.0));
  if (kind == "ou")
    return DiffusionModel::ou(j.value("theta", 1.0), j.value("sigma", 1.0));
  if (kind == "sine")
    return DiffusionModel::sine(j.value("a", 2.0), j.value("b", 2.0),
                                j.value("omega", 8.0), j.value("sigma", 0.5));
  throw ConfigError("model.kind must be scaled_bm, ou, or sine (got " + kind +
                    ")");
}

// Column documentation written next to every CSV artifact.
void write_schema(const ExperimentConfig& cfg) {
  const auto path = std::filesystem::path(cfg.out_dir) / "schema.txt";
  std::ofstream out(path);
  out << "chain.csv (unblocked): draw index, path value at T/2, proposals "
         "used for that draw\n"
      << "chain.csv (blocked): sweep index, knot values k1..km, cumulative "
         "wall-clock seconds\n"
      << "rates.csv: scheme, model, m, T, delta=T/(m+1), partial correlation "
         "c(delta), lambda_max, convergence rate rho, relaxation time\n"
      << "cost_per_sweep.csv / taess_vs_delta.csv / cost_vs_t.csv: T, m, "
         "delta, sweeps, seconds, sec_per_sweep, proposals_per_sweep, ess, "
         "taess, fitted_rate, analytic_rate, error\n"
      << "summary.json: seed, config_hash, version, model, and per-run "
         "draws/sweeps, seconds, ess, taess, mean_proposals\n";
}

std::ofstream open_output(const ExperimentConfig& cfg,
                          const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out << "# bridgeblock v" << kVersion << " seed=" << cfg.seed
      << " config_hash=" << std::hex << cfg.config_hash << std::dec << "\n";
  write_schema(cfg);
  return out;
}

// Index of the knot closest to T/2: the default monitored functional.
std::size_t midpoint_knot(const BlockingLayout& layout) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < layout.anchors.size(); ++i) {
    const double d = std::abs(layout.anchors[i] - layout.T / 2.0);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.model = model_from_json(j.at("model"));
    cfg.x0 = j.value("x0", 0.0);
    cfg.xT = j.value("xT", 0.0);
    if (j.contains("T"))
      cfg.T_grid = {j.at("T").get<double>()};
    else if (j.contains("T_grid"))
      cfg.T_grid = j.at("T_grid").get<std::vector<double>>();
    if (cfg.T_grid.empty()) throw ConfigError("T grid must be nonempty");
    if (j.contains("m"))
      cfg.m_grid = {j.at("m").get<int>()};
    else if (j.contains("m_grid"))
      cfg.m_grid = j.at("m_grid").get<std::vector<int>>();
    cfg.c1 = j.value("c1", 10.0);
    cfg.chi1 = j.value("chi1", 0.0);
    cfg.scheme = scheme_from_name(j.value("scheme", "checkerboard"));
    cfg.n_sweeps = j.value("n_sweeps", 1000L);
    cfg.burn_in = j.value("burn_in", -1L);
    cfg.mesh_h = j.value("mesh_h", 1e-3);
    const std::string variant = j.value("variant", "approximate");
    if (variant == "approximate")
      cfg.variant = PathVariant::Approximate;
    else if (variant == "exact")
      cfg.variant = PathVariant::Exact;
    else
      throw ConfigError("variant must be approximate or exact");
    cfg.seed = j.value("seed", 1ULL);
    cfg.max_proposals = j.value("max_proposals", kDefaultProposalBudget);
    cfg.out_dir = j.value("out_dir", std::string("."));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
  if (const char* env = std::getenv("BRIDGEBLOCK_OUT_DIR")) cfg.out_dir = env;
  cfg.config_hash = fnv1a(j.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

long effective_burn_in(const ExperimentConfig& cfg, double T, int m) {
  if (cfg.burn_in >= 0) return cfg.burn_in;
  try {
    const double rho =
        convergence_rate(cfg.scheme, m, partial_corr(cfg.model, T / (m + 1)));
    const double relax = relaxation_time(rho);
    return std::max<long>(10 * static_cast<long>(std::ceil(relax)), 1000);
  } catch (const UnsupportedModel&) {
    return cfg.n_sweeps / 10;
  }
}

namespace {

ExperimentCell run_cell(const ExperimentConfig& cfg, double T, int m) {
  ExperimentCell cell;
  cell.T = T;
  cell.m = m;
  cell.delta = T / (m + 1);
  cell.fitted_rate = std::numeric_limits<double>::quiet_NaN();
  cell.analytic_rate = std::numeric_limits<double>::quiet_NaN();
  try {
    const BlockingLayout layout = build_layout(T, m, cfg.scheme);
    RngStream rng =
        RngStream(cfg.seed).fork(fnv1a("cell"), m, static_cast<long>(T * 1e6));
    MeshSpec mesh{cfg.mesh_h};
    KnotChain chain =
        run_blocked_sampler(cfg.model, cfg.x0, cfg.xT, layout, cfg.n_sweeps,
                            mesh, rng, {}, cfg.variant, cfg.max_proposals);
    if (!chain.error.empty()) {
      cell.error = chain.error;
      return cell;
    }
    cell.sweeps = static_cast<long>(chain.knots.size());
    cell.seconds = chain.total_seconds;
    cell.sec_per_sweep = chain.total_seconds / cell.sweeps;
    double props = 0.0;
    for (long p : chain.proposals) props += static_cast<double>(p);
    cell.proposals_per_sweep = props / cell.sweeps;

    const long burn = std::min<long>(effective_burn_in(cfg, T, m),
                                     cell.sweeps > 1 ? cell.sweeps - 1 : 0);
    const std::size_t mid = midpoint_knot(layout);
    std::vector<double> series;
    series.reserve(cell.sweeps - burn);
    for (long i = burn; i < cell.sweeps; ++i)
      series.push_back(chain.knots[i][mid]);
    if (series.size() >= 4) {
      cell.ess = ess(series);
      cell.taess = cell.ess / chain.total_seconds;
      try {
        const auto rho = autocorrelation(
            series, static_cast<int>(std::min<std::size_t>(200, series.size() / 2 - 1)));
        cell.fitted_rate = fit_geometric_rate(rho);
      } catch (const std::exception&) {
      }
    }
    try {
      cell.analytic_rate =
          convergence_rate(cfg.scheme, m, partial_corr(cfg.model, cell.delta));
    } catch (const std::exception&) {
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

void write_cells(std::ofstream& out, const ExperimentRecord& rec) {
  out << "T,m,delta,sweeps,seconds,sec_per_sweep,proposals_per_sweep,ess,"
         "taess,fitted_rate,analytic_rate,error\n";
  for (const auto& c : rec.cells) {
    out << c.T << ',' << c.m << ',' << c.delta << ',' << c.sweeps << ','
        << c.seconds << ',' << c.sec_per_sweep << ',' << c.proposals_per_sweep
        << ',' << c.ess << ',' << c.taess << ',' << c.fitted_rate << ','
        << c.analytic_rate << ',' << c.error << "\n";
  }
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                ExperimentKind kind) {
  ExperimentRecord rec;
  rec.kind = kind;
  switch (kind) {
    case ExperimentKind::CostPerSweep: {
      const double T = cfg.T_grid.front();
      for (int m : cfg.m_grid) rec.cells.push_back(run_cell(cfg, T, m));
      break;
    }
    case ExperimentKind::TaessVsDelta: {
      for (double T : cfg.T_grid)
        for (int m : cfg.m_grid) rec.cells.push_back(run_cell(cfg, T, m));
      break;
    }
    case ExperimentKind::CostVsT: {
      std::vector<double> lx, ly;
      for (double T : cfg.T_grid) {
        const int m = optimal_num_knots(T, cfg.c1, cfg.chi1);
        ExperimentCell cell = run_cell(cfg, T, m);
        if (cell.error.empty() && cell.taess > 0.0) {
          lx.push_back(std::log(T));
          ly.push_back(std::log(1.0 / cell.taess));
        }
        rec.cells.push_back(std::move(cell));
      }
      if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
          mx += lx[i];
          my += ly[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
          sxy += (lx[i] - mx) * (ly[i] - my);
          sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        rec.cost_slope = sxy / sxx;
      }
      break;
    }
  }
  return rec;
}

int cmd_sample(const ExperimentConfig& cfg, std::ostream& log) {
  const double T = cfg.T_grid.front();
  MeshSpec mesh{cfg.mesh_h};
  std::ofstream chain_csv = open_output(cfg, "chain.csv");
  json summary;
  summary["seed"] = cfg.seed;
  summary["config_hash"] = cfg.config_hash;
  summary["version"] = kVersion;
  summary["model"] = cfg.model.name();

  try {
    if (cfg.m_grid.empty()) {
      // Unblocked rejection sampler: independent draws, record the midpoint.
      chain_csv << "draw,x_mid,proposals\n";
      RngStream rng = RngStream(cfg.seed).fork(fnv1a("sample"));
      long total_proposals = 0, accepted = 0;
      for (long n = 0; n < cfg.n_sweeps; ++n) {
        RngStream stream = rng.fork(n);
        Path p = sample_bridge_rejection(cfg.model, cfg.x0, cfg.xT, 0.0, T,
                                         mesh, stream, cfg.max_proposals);
        const auto it = std::lower_bound(p.times.begin(), p.times.end(),
                                         T / 2.0 - 1e-12);
        chain_csv << n << ',' << p.values[it - p.times.begin()] << ','
                  << p.proposals_used << "\n";
        total_proposals += p.proposals_used;
        ++accepted;
      }
      summary["draws"] = accepted;
      summary["mean_proposals"] =
          static_cast<double>(total_proposals) / std::max(1L, accepted);
    } else {
      const int m = cfg.m_grid.front();
      const BlockingLayout layout = build_layout(T, m, cfg.scheme);
      chain_csv << "sweep";
      for (int i = 1; i <= m; ++i) chain_csv << ",k" << i;
      chain_csv << ",elapsed_seconds\n";
      RngStream rng = RngStream(cfg.seed).fork(fnv1a("sample"));
      auto recorder = [&](long sweep, const std::vector<double>& knots,
                          double elapsed) {
        chain_csv << sweep;
        for (double k : knots) chain_csv << ',' << k;
        chain_csv << ',' << elapsed << "\n";
      };
      KnotChain chain =
          run_blocked_sampler(cfg.model, cfg.x0, cfg.xT, layout, cfg.n_sweeps,
                              mesh, rng, recorder, cfg.variant,
                              cfg.max_proposals);
      if (!chain.error.empty()) throw BudgetExceeded(chain.error, cfg.max_proposals);
      const long burn = std::min<long>(
          effective_burn_in(cfg, T, m),
          chain.knots.size() > 1 ? static_cast<long>(chain.knots.size()) - 1 : 0);
      const std::size_t mid = midpoint_knot(layout);
      std::vector<double> series;
      for (std::size_t i = burn; i < chain.knots.size(); ++i)
        series.push_back(chain.knots[i][mid]);
      summary["sweeps"] = chain.knots.size();
      summary["seconds"] = chain.total_seconds;
      if (series.size() >= 4) {
        summary["ess"] = ess(series);
        summary["taess"] = ess(series) / chain.total_seconds;
      }
    }
  } catch (const BudgetExceeded& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }

  std::ofstream summary_out = open_output(cfg, "summary.json");
  summary_out << summary.dump(2) << "\n";
  log << "wrote chain.csv and summary.json to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_rates(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.model.kind() == ModelKind::Sine) {
    log << "error: rates require a Gaussian model (scaled_bm or ou)\n";
    return 2;
  }
  std::ofstream out = open_output(cfg, "rates.csv");
  out << "scheme,model,m,T,delta,c_delta,lambda_max,rho,relaxation_time\n";
  for (double T : cfg.T_grid) {
    for (int m : cfg.m_grid) {
      const RateReport r = rate_report(cfg.model, cfg.scheme, m, T);
      out << scheme_name(r.scheme) << ',' << cfg.model.name() << ',' << r.m
          << ',' << r.T << ',' << r.delta << ',' << r.c_delta << ','
          << r.lambda_max << ',' << r.rho << ',' << r.relaxation_time << "\n";
    }
  }
  log << "wrote rates.csv to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, ExperimentKind kind,
                   std::ostream& log) {
  const ExperimentRecord rec = run_experiment(cfg, kind);
  std::string name;
  switch (kind) {
    case ExperimentKind::CostPerSweep: name = "cost_per_sweep.csv"; break;
    case ExperimentKind::TaessVsDelta: name = "taess_vs_delta.csv"; break;
    case ExperimentKind::CostVsT: name = "cost_vs_t.csv"; break;
  }
  std::ofstream out = open_output(cfg, name);
  write_cells(out, rec);
  if (kind == ExperimentKind::CostVsT)
    out << "# cost_slope=" << rec.cost_slope << "\n";
  bool any_failed = false;
  for (const auto& c : rec.cells) any_failed |= !c.error.empty();
  log << "wrote " << name << " to " << cfg.out_dir;
  if (kind == ExperimentKind::CostVsT) log << " (cost_slope=" << rec.cost_slope << ")";
  log << "\n";
  if (any_failed) {
    log << "warning: some grid cells failed (see error column)\n";
    return 4;
  }
  return 0;
}

}  // namespace bridgeblock

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hitchsim/config.hpp"
#include "hitchsim/engine.hpp"

namespace fs = std::filesystem;
using namespace hitchsim;

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  return out;
}

ScenarioResult run_one(const ScenarioConfig& cfg, const LoadedScenario& loaded) {
  return run_scenario(loaded.net, loaded.requests, cfg.sim, cfg.seeds,
                      loaded.background ? &*loaded.background : nullptr, cfg.depots_file);
}

int cmd_simulate(const std::string& config_file, const std::string& out_override,
                 const std::string& seed_list, int iterations, bool force) {
  ScenarioConfig cfg = parse_config(config_file);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (!seed_list.empty()) cfg.seeds = parse_seed_list(seed_list);
  if (iterations > 0) cfg.sim.learning_iterations = iterations;
  LoadedScenario loaded = load_scenario(cfg);
  ScenarioResult result = run_one(cfg, loaded);
  auto manifest = emit_reports(loaded.net, cfg, result, cfg.out_dir, force);
  std::cout << "wrote " << manifest.size() << " files under " << cfg.out_dir << "\n";
  return 0;
}

// Rows shared by the side-by-side delta tables, keyed into the averaged scalars.
struct TableRow {
  const char* table;
  const char* label;
  const char* key;
  double scale;
};

const TableRow kRows[] = {
    {"table1", "requests_served_shared", "served_shared", 1.0},
    {"table1", "peak_travel_min", "mean_travel_s_shared_peak", 1.0 / 60.0},
    {"table1", "midday_travel_min", "mean_travel_s_shared_midday", 1.0 / 60.0},
    {"table1", "peak_wait_min", "mean_wait_s_shared_peak", 1.0 / 60.0},
    {"table1", "midday_wait_min", "mean_wait_s_shared_midday", 1.0 / 60.0},
    {"table2", "parcel_requests_served", "served_parcel", 1.0},
    {"table2", "am_peak_wait_min", "mean_wait_s_parcel_am", 1.0 / 60.0},
    {"table2", "midday_wait_min", "mean_wait_s_parcel_midday", 1.0 / 60.0},
    {"table2", "pm_peak_wait_min", "mean_wait_s_parcel_pm", 1.0 / 60.0},
    {"table2", "carrier_driving_h", "carrier_driving_h", 1.0},
    {"table3", "demand_served_total", "demand_served_total", 1.0},
    {"table3", "distance_travelled_km", "mod_distance_km", 1.0},
    {"table3", "vehicle_utilization_peak", "utilization_peak", 1.0},
    {"table3", "vehicle_utilization_midday", "utilization_midday", 1.0},
    {"table4", "total_vht_h", "total_vht_h", 1.0},
    {"table4", "total_vkt_km", "total_vkt_km", 1.0},
    {"table4", "tti_weighted_average", "tti_weighted_daily", 1.0},
    {"table4", "tti_weighted_peak", "tti_weighted_peak", 1.0},
};

int cmd_compare(const std::string& config_file, const std::string& strategies_arg,
                const std::string& out_override, bool force) {
  ScenarioConfig base_cfg = parse_config(config_file);
  if (!out_override.empty()) base_cfg.out_dir = out_override;

  std::vector<std::string> strategies;
  std::stringstream ss(strategies_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) strategies.push_back(tok);
  if (strategies.empty()) throw std::runtime_error("empty strategy list");

  fs::path root(base_cfg.out_dir);
  if (fs::exists(root) && !fs::is_empty(root) && !force)
    throw std::runtime_error(base_cfg.out_dir + " exists and is not empty (use --force)");
  fs::create_directories(root);

  LoadedScenario loaded = load_scenario(base_cfg);
  std::map<std::string, MetricsReport> averaged;
  for (const std::string& name : strategies) {
    ScenarioConfig cfg = base_cfg;
    cfg.sim.strategy.strategy = strategy_from_string(name);
    std::cout << "running " << name << " ..." << std::endl;
    ScenarioResult result = run_one(cfg, loaded);
    emit_reports(loaded.net, cfg, result, (root / name).string(), force);
    averaged[name] = result.averaged;
  }

  // one delta table per paper table, first strategy as the reference column
  const std::string& ref = strategies.front();
  for (const char* table : {"table1", "table2", "table3", "table4"}) {
    std::ofstream out((root / (std::string("compare_") + table + ".csv")));
    out << "metric";
    for (const std::string& s : strategies) out << "," << s;
    out << "\n";
    for (const TableRow& row : kRows) {
      if (std::string(row.table) != table) continue;
      out << row.label;
      const auto& refs = averaged[ref].scalars;
      auto rit = refs.find(row.key);
      for (const std::string& s : strategies) {
        const auto& sc = averaged[s].scalars;
        auto it = sc.find(row.key);
        if (it == sc.end()) {
          out << ",NA";
          continue;
        }
        char buf[96];
        double v = it->second * row.scale;
        if (s != ref && rit != refs.end() && rit->second != 0) {
          double pct = 100.0 * (it->second - rit->second) / rit->second;
          std::snprintf(buf, sizeof buf, ",%.4g (%+.1f%%)", v, pct);
        } else {
          std::snprintf(buf, sizeof buf, ",%.4g", v);
        }
        out << buf;
      }
      out << "\n";
    }
  }
  std::cout << "comparison written under " << base_cfg.out_dir << "\n";
  return 0;
}

int cmd_gen_demand(const std::string& config_file, const std::string& out_dir) {
  ScenarioConfig cfg = parse_config(config_file);
  Network net = Network::load(cfg.nodes_file, cfg.links_file);
  std::optional<SpatialWeights> pax_spatial, parcel_spatial;
  if (!cfg.passenger_spatial_file.empty())
    pax_spatial = SpatialWeights::load(cfg.passenger_spatial_file, net);
  if (!cfg.parcel_spatial_file.empty())
    parcel_spatial = SpatialWeights::load(cfg.parcel_spatial_file, net);
  fs::create_directories(out_dir);
  if (cfg.passenger_total > 0) {
    DemandProfile p = DemandProfile::load(cfg.passenger_profile_file, cfg.passenger_total,
                                          cfg.shared_fraction);
    auto reqs = generate_passenger_requests(p, net, cfg.demand_seed, 0,
                                            pax_spatial ? &*pax_spatial : nullptr);
    write_requests_csv(out_dir + "/passengers.csv", reqs);
    std::cout << "wrote " << reqs.size() << " passenger requests\n";
  }
  if (cfg.parcel_total > 0) {
    DemandProfile p = DemandProfile::load(cfg.parcel_profile_file, cfg.parcel_total);
    auto reqs = generate_parcel_requests(p, net, cfg.demand_seed + 1, cfg.passenger_total,
                                         parcel_spatial ? &*parcel_spatial : nullptr);
    write_requests_csv(out_dir + "/parcels.csv", reqs);
    std::cout << "wrote " << reqs.size() << " parcel requests\n";
  }
  return 0;
}

int cmd_validate(const std::string& config_file) {
  ScenarioConfig cfg = parse_config(config_file);
  LoadedScenario loaded = load_scenario(cfg);
  if (!cfg.depots_file.empty()) load_depots(cfg.depots_file, loaded.net);
  std::cout << "ok: " << loaded.net.nodes().size() << " nodes, "
            << loaded.net.links().size() << " links, " << loaded.requests.size()
            << " requests\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mobility-on-demand cargo-hitching fleet simulator"};
  app.require_subcommand(1);

  std::string config_file, out_dir, seed_list, strategies = "BASE,SHR,SHR_IDL,SHR_RIDL";
  int iterations = 0;
  bool force = false;

  auto* sim = app.add_subcommand("simulate", "run one scenario");
  sim->add_option("--config", config_file, "scenario config file")->required();
  sim->add_option("--out", out_dir, "output directory (overrides config)");
  sim->add_option("--seed-list", seed_list, "comma-separated seeds");
  sim->add_option("--iterations", iterations, "within-day learning passes");
  sim->add_flag("--force", force, "overwrite existing output");

  auto* cmp = app.add_subcommand("compare", "run a strategy list side by side");
  cmp->add_option("--config", config_file, "scenario config file")->required();
  cmp->add_option("--strategies", strategies, "comma-separated strategy list");
  cmp->add_option("--out", out_dir, "output directory (overrides config)");
  cmp->add_flag("--force", force, "overwrite existing output");

  auto* gen = app.add_subcommand("gen-demand", "write synthetic request files");
  gen->add_option("--config", config_file, "scenario config file")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* val = app.add_subcommand("validate", "check inputs without running");
  val->add_option("--config", config_file, "scenario config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_file, out_dir, seed_list, iterations, force);
    if (cmp->parsed()) return cmd_compare(config_file, strategies, out_dir, force);
    if (gen->parsed()) return cmd_gen_demand(config_file, out_dir);
    if (val->parsed()) return cmd_validate(config_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

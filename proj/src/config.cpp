#include "hitchsim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fs = std::filesystem;

namespace hitchsim {

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    std::uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "': bad integer '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::runtime_error("config key '" + key + "': bad number '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("config key '" + key + "': bad bool '" + v + "'");
}

}  // namespace

ScenarioConfig parse_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file);
  ScenarioConfig c;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(file + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trimmed.substr(0, eq);
    std::string val = trimmed.substr(eq + 1);
    auto strip = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    strip(key);
    strip(val);
    if (!seen.insert(key).second)
      throw std::runtime_error("config key '" + key + "' given twice");

    if (key == "nodes") c.nodes_file = val;
    else if (key == "links") c.links_file = val;
    else if (key == "passenger_requests") c.passenger_requests_file = val;
    else if (key == "parcel_requests") c.parcel_requests_file = val;
    else if (key == "passenger_profile") c.passenger_profile_file = val;
    else if (key == "parcel_profile") c.parcel_profile_file = val;
    else if (key == "passenger_total") c.passenger_total = static_cast<int>(parse_u64(key, val));
    else if (key == "parcel_total") c.parcel_total = static_cast<int>(parse_u64(key, val));
    else if (key == "shared_fraction") c.shared_fraction = parse_double(key, val);
    else if (key == "demand_seed") c.demand_seed = parse_u64(key, val);
    else if (key == "passenger_spatial_weights") c.passenger_spatial_file = val;
    else if (key == "parcel_spatial_weights") c.parcel_spatial_file = val;
    else if (key == "depots") c.depots_file = val;
    else if (key == "background") c.background_file = val;
    else if (key == "strategy") c.sim.strategy.strategy = strategy_from_string(val);
    else if (key == "fleet_size") c.sim.fleet_size = static_cast<int>(parse_u64(key, val));
    else if (key == "seeds") {
      c.seeds.clear();
      std::stringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) c.seeds.push_back(parse_u64(key, tok));
    }
    else if (key == "iterations")
      c.sim.learning_iterations = static_cast<int>(parse_u64(key, val));
    else if (key == "tolerance") c.sim.learning_tolerance = parse_double(key, val);
    else if (key == "bin_width_s") c.sim.bin_width_s = parse_double(key, val);
    else if (key == "cycle_s") c.sim.strategy.cycle_s = parse_double(key, val);
    else if (key == "max_passenger_wait_s")
      c.sim.strategy.max_passenger_wait_s = parse_double(key, val);
    else if (key == "parcel_approach_wait_s")
      c.sim.strategy.parcel_approach_wait_s = parse_double(key, val);
    else if (key == "idle_eligibility_s")
      c.sim.strategy.idle_eligibility_s = parse_double(key, val);
    else if (key == "detour_factor") c.sim.strategy.detour_factor = parse_double(key, val);
    else if (key == "dwell_s") c.sim.strategy.dwell_s = parse_double(key, val);
    else if (key == "seat_capacity")
      c.sim.strategy.seat_capacity = static_cast<int>(parse_u64(key, val));
    else if (key == "multi_parcel") c.sim.strategy.multi_parcel = parse_bool(key, val);
    else if (key == "out_dir") c.out_dir = val;
    else
      throw std::runtime_error("unknown config key '" + key + "'");
  }
  if (c.nodes_file.empty()) throw std::runtime_error("missing required config key 'nodes'");
  if (c.links_file.empty()) throw std::runtime_error("missing required config key 'links'");
  if (c.sim.fleet_size < 1) throw std::runtime_error("config key 'fleet_size' must be >= 1");
  if (c.seeds.empty()) throw std::runtime_error("config key 'seeds' must not be empty");
  if (c.sim.learning_iterations < 1)
    throw std::runtime_error("config key 'iterations' must be >= 1");
  c.sim.strategy.validate();
  return c;
}

LoadedScenario load_scenario(const ScenarioConfig& cfg) {
  LoadedScenario out{Network::load(cfg.nodes_file, cfg.links_file), {}, std::nullopt};
  const Network& net = out.net;

  std::optional<SpatialWeights> pax_spatial, parcel_spatial;
  if (!cfg.passenger_spatial_file.empty())
    pax_spatial = SpatialWeights::load(cfg.passenger_spatial_file, net);
  if (!cfg.parcel_spatial_file.empty())
    parcel_spatial = SpatialWeights::load(cfg.parcel_spatial_file, net);

  std::vector<Request> passengers, parcels;
  if (!cfg.passenger_requests_file.empty()) {
    passengers = load_requests(cfg.passenger_requests_file, net);
  } else if (cfg.passenger_total > 0) {
    if (cfg.passenger_profile_file.empty())
      throw std::runtime_error("passenger_total set but no passenger_profile given");
    DemandProfile p = DemandProfile::load(cfg.passenger_profile_file, cfg.passenger_total,
                                          cfg.shared_fraction);
    passengers = generate_passenger_requests(p, net, cfg.demand_seed, 0,
                                             pax_spatial ? &*pax_spatial : nullptr);
  }
  if (!cfg.parcel_requests_file.empty()) {
    parcels = load_requests(cfg.parcel_requests_file, net);
  } else if (cfg.parcel_total > 0) {
    if (cfg.parcel_profile_file.empty())
      throw std::runtime_error("parcel_total set but no parcel_profile given");
    DemandProfile p = DemandProfile::load(cfg.parcel_profile_file, cfg.parcel_total);
    parcels = generate_parcel_requests(p, net, cfg.demand_seed + 1, cfg.passenger_total,
                                       parcel_spatial ? &*parcel_spatial : nullptr);
  }
  out.requests = std::move(passengers);
  out.requests.insert(out.requests.end(), parcels.begin(), parcels.end());
  std::stable_sort(out.requests.begin(), out.requests.end(),
                   [](const Request& a, const Request& b) {
                     return a.request_time < b.request_time ||
                            (a.request_time == b.request_time && a.id < b.id);
                   });
  std::set<int> ids;
  for (const Request& r : out.requests)
    if (!ids.insert(r.id).second)
      throw std::runtime_error("duplicate request id " + std::to_string(r.id));

  if (!cfg.background_file.empty())
    out.background = load_background(cfg.background_file, net, cfg.sim.bin_width_s);
  return out;
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

void write_events_csv(const std::string& path, const RunLog& log) {
  std::ofstream out(path);
  out << "t,vehicle_id,event,request_id,node\n";
  char buf[128];
  for (const EventRecord& e : log.events) {
    if (e.request_id >= 0)
      std::snprintf(buf, sizeof buf, "%.17g,%d,%s,%d,%d\n", e.t, e.vehicle_id,
                    to_string(e.type), e.request_id, e.node);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%d,%s,,%d\n", e.t, e.vehicle_id,
                    to_string(e.type), e.node);
    out << buf;
  }
}

void write_decisions_csv(const std::string& path, const RunLog& log) {
  std::ofstream out(path);
  out << "t,request_id,vehicle_id,mechanism\n";
  char buf[128];
  for (const AssignmentDecision& d : log.decisions) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%s\n", d.t, d.request_id, d.vehicle_id,
                  to_string(d.mechanism));
    out << buf;
  }
}

void write_traversals_csv(const std::string& path, const Network& net, const RunLog& log) {
  std::ofstream out(path);
  out << "vehicle_id,link_id,t_entry,t_exit\n";
  char buf[128];
  for (const Traversal& t : log.traversals) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", t.vehicle_id,
                  net.links()[t.link_idx].id, t.t_entry, t.t_exit);
    out << buf;
  }
}

void write_requests_final_csv(const std::string& path, const RunLog& log) {
  std::ofstream out(path);
  out << "id,kind,origin,dest,request_time_s,state,vehicle,t_assigned,t_pickup,t_dropoff,"
         "t_failed\n";
  char buf[320];
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", *v);
    return std::string(b);
  };
  for (const Request& r : log.requests) {
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%d,%.17g,%s,%s,%s,%s,%s,%s\n", r.id,
                  to_string(r.kind), r.origin, r.dest, r.request_time, to_string(r.state),
                  r.assigned_vehicle ? std::to_string(*r.assigned_vehicle).c_str() : "",
                  opt(r.t_assigned).c_str(), opt(r.t_pickup).c_str(),
                  opt(r.t_dropoff).c_str(), opt(r.t_failed).c_str());
    out << buf;
  }
}

void write_links_meta_csv(const std::string& path, const Network& net) {
  std::ofstream out(path);
  out << "link_id,length_m,fft_s\n";
  char buf[128];
  for (const Link& l : net.links()) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", l.id, l.length_m, l.free_flow_time());
    out << buf;
  }
}

void write_carrier_summary_csv(const std::string& path, const std::vector<CarrierTour>& tours) {
  std::ofstream out(path);
  out << "tour_idx,depot,stops,total_time_s,total_distance_m\n";
  char buf[160];
  for (size_t i = 0; i < tours.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%zu,%.17g,%.17g\n", i, tours[i].depot_id,
                  tours[i].parcel_ids.size(), tours[i].total_time, tours[i].total_distance);
    out << buf;
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> emit_reports(const Network& net,
                                                              const ScenarioConfig& cfg,
                                                              const ScenarioResult& result,
                                                              const std::string& out_dir,
                                                              bool force) {
  fs::path root(out_dir);
  if (fs::exists(root) && !fs::is_empty(root) && !force)
    throw std::runtime_error(out_dir + " exists and is not empty (use --force)");
  fs::create_directories(root);

  std::vector<std::string> files;
  for (const ReplicationResult& rep : result.replications) {
    std::string sub = "seed_" + std::to_string(rep.seed);
    fs::create_directories(root / sub);
    auto p = [&](const std::string& name) { return (root / sub / name).string(); };

    write_events_csv(p("events.csv"), rep.log);
    write_decisions_csv(p("decisions.csv"), rep.log);
    write_traversals_csv(p("traversals.csv"), net, rep.log);
    write_requests_final_csv(p("requests_final.csv"), rep.log);
    write_links_meta_csv(p("links_meta.csv"), net);
    rep.field.dump_csv(p("ttfield.csv"));
    write_metrics_json(p("metrics.json"), rep.report);
    write_tables_csv((root / sub).string(), rep.report);
    write_series_csv((root / sub).string(), rep.report);
    if (!cfg.depots_file.empty()) {
      write_tours_csv(p("carrier_tours.csv"), rep.carrier_tours);
      write_carrier_summary_csv(p("carrier_summary.csv"), rep.carrier_tours);
    }

    nlohmann::json meta;
    meta["seed"] = rep.seed;
    meta["fleet_size"] = cfg.sim.fleet_size;
    meta["strategy"] = to_string(cfg.sim.strategy.strategy);
    meta["dwell_s"] = cfg.sim.strategy.dwell_s;
    meta["am_peak"] = {cfg.sim.strategy.am_peak_start, cfg.sim.strategy.am_peak_end};
    meta["pm_peak"] = {cfg.sim.strategy.pm_peak_start, cfg.sim.strategy.pm_peak_end};
    meta["midday"] = {cfg.sim.strategy.midday_start, cfg.sim.strategy.midday_end};
    std::ofstream(p("run_meta.json")) << meta.dump(2) << "\n";

    for (const char* name :
         {"events.csv", "decisions.csv", "traversals.csv", "requests_final.csv",
          "links_meta.csv", "ttfield.csv", "metrics.json", "table1.csv", "table2.csv",
          "table3.csv", "table4.csv", "fig6_status.csv", "fig7_requests.csv",
          "run_meta.json"})
      files.push_back(sub + "/" + name);
    if (!cfg.depots_file.empty()) {
      files.push_back(sub + "/carrier_tours.csv");
      files.push_back(sub + "/carrier_summary.csv");
    }
  }

  write_metrics_json((root / "metrics.json").string(), result.averaged);
  write_tables_csv(root.string(), result.averaged);
  for (const char* name :
       {"metrics.json", "table1.csv", "table2.csv", "table3.csv", "table4.csv"})
    files.push_back(name);
  if (!cfg.depots_file.empty()) {
    write_carrier_summary_csv((root / "carrier_baseline_summary.csv").string(),
                              result.baseline_tours);
    files.push_back("carrier_baseline_summary.csv");
  }

  std::vector<std::pair<std::string, std::string>> manifest;
  for (const std::string& f : files)
    manifest.emplace_back(f, fnv1a64_file((root / f).string()));
  nlohmann::json j;
  for (const auto& [f, sum] : manifest) j["files"][f] = sum;
  std::ofstream((root / "manifest.json").string()) << j.dump(2) << "\n";
  return manifest;
}

}  // namespace hitchsim

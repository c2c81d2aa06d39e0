#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitchsim/engine.hpp"

namespace hitchsim {

// Flat key=value scenario file; every knob is a scalar or a path.
struct ScenarioConfig {
  std::string nodes_file, links_file;
  std::string passenger_requests_file, parcel_requests_file;  // ingest, or:
  std::string passenger_profile_file, parcel_profile_file;    // synthesize
  int passenger_total = 0, parcel_total = 0;
  double shared_fraction = 0.27;
  std::uint64_t demand_seed = 12345;
  std::string passenger_spatial_file, parcel_spatial_file;  // optional skew
  std::string depots_file, background_file;
  SimConfig sim;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir = "out";
};

ScenarioConfig parse_config(const std::string& file);

// Everything run_scenario needs, resolved from a config.
struct LoadedScenario {
  Network net;
  std::vector<Request> requests;  // passengers + parcels, time-ordered
  std::optional<VolumeGrid> background;
};

LoadedScenario load_scenario(const ScenarioConfig& cfg);

// Writes per-seed logs/metrics plus the averaged report and a checksum
// manifest under out_dir. Refuses a non-empty out_dir unless force.
// Returns the manifest entries (relative path, checksum).
std::vector<std::pair<std::string, std::string>> emit_reports(const Network& net,
                                                              const ScenarioConfig& cfg,
                                                              const ScenarioResult& result,
                                                              const std::string& out_dir,
                                                              bool force);

std::string fnv1a64_file(const std::string& path);

}  // namespace hitchsim

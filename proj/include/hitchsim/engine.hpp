#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hitchsim/dispatch.hpp"
#include "hitchsim/freight.hpp"
#include "hitchsim/log.hpp"
#include "hitchsim/metrics.hpp"
#include "hitchsim/network.hpp"

namespace hitchsim {

struct SimConfig {
  StrategyConfig strategy;
  int fleet_size = 100;
  double bin_width_s = 900;
  int learning_iterations = 3;
  double learning_tolerance = 0.05;  // mean relative field change
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  RunLog log;
  VolumeGrid volumes;
  TravelTimeField field;  // field the final pass ran on
  MetricsReport report;
  std::vector<CarrierTour> carrier_tours;  // offloaded remainder, when depots given
};

// One simulated day on a fixed travel-time field. Deterministic per seed.
RunLog run_day(const Network& net, const TravelTimeField& field,
               const std::vector<Request>& requests, const SimConfig& cfg,
               std::uint64_t seed, VolumeGrid* volumes_out = nullptr);

// run_day repeated with MSA travel-time updates between passes; stops at the
// iteration cap or when the field change drops under tolerance.
ReplicationResult run_with_learning(const Network& net, const std::vector<Request>& requests,
                                    const SimConfig& cfg, std::uint64_t seed,
                                    const VolumeGrid* background = nullptr);

struct ScenarioResult {
  std::vector<ReplicationResult> replications;  // sorted by seed
  MetricsReport averaged;
  std::vector<CarrierTour> baseline_tours;  // all-parcel carrier plan, shared by seeds
};

// Full scenario: one replication per seed, metrics averaged across seeds.
// Carrier tours are rebuilt per replication from the parcels MOD did not serve.
ScenarioResult run_scenario(const Network& net, const std::vector<Request>& requests,
                            const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                            const VolumeGrid* background = nullptr,
                            const std::string& depots_file = "");

}  // namespace hitchsim

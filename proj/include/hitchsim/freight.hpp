#pragma once

#include <string>
#include <vector>

#include "hitchsim/demand.hpp"
#include "hitchsim/network.hpp"

namespace hitchsim {

struct Depot {
  int id;
  int node;  // node id
  int vehicle_count = 1;
  int vehicle_capacity = 50;  // parcels per tour
};

std::vector<Depot> load_depots(const std::string& file, const Network& net);

struct TourLeg {
  int from_node, to_node;  // node ids
  double time_s = 0;
  double distance_m = 0;
};

struct CarrierTour {
  int depot_id = 0;
  std::vector<int> parcel_ids;  // delivery order
  double start_time = 0;
  std::vector<TourLeg> legs;  // depot -> stops -> depot
  double total_time = 0;
  double total_distance = 0;
};

struct CarrierMetrics {
  double driving_time_h = 0;
  double vkt_km = 0;
  int trip_count = 0;
};

// Nearest-depot assignment, request-time batching to vehicle capacity,
// nearest-neighbor sequencing over the parcel delivery stops. Unroutable
// parcels are skipped (reported in unroutable_out when given).
std::vector<CarrierTour> build_tours(const std::vector<Request>& parcels,
                                     const std::vector<Depot>& depots, const Network& net,
                                     const TravelTimeField& field,
                                     std::vector<int>* unroutable_out = nullptr);

CarrierMetrics carrier_metrics(const std::vector<CarrierTour>& tours);

// Parcels left to the conventional carrier after MOD served some.
std::vector<Request> offload(const std::vector<Request>& parcels,
                             const std::vector<int>& mod_served_ids);

void write_tours_csv(const std::string& file, const std::vector<CarrierTour>& tours);

}  // namespace hitchsim

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitchsim/network.hpp"

namespace hitchsim {

enum class RequestKind { PassengerSingle, PassengerShared, Parcel };
enum class RequestState { Pending, Assigned, Onboard, Completed, Failed };

const char* to_string(RequestKind k);
const char* to_string(RequestState s);
RequestKind request_kind_from_string(const std::string& s);

struct Request {
  int id = 0;
  RequestKind kind = RequestKind::PassengerSingle;
  int origin = 0, dest = 0;  // node ids
  double request_time = 0;
  RequestState state = RequestState::Pending;
  std::optional<int> assigned_vehicle;
  std::optional<double> t_assigned, t_pickup, t_dropoff, t_failed;
  std::string fail_reason;

  bool is_passenger() const { return kind != RequestKind::Parcel; }
};

struct DemandProfile {
  std::array<double, 24> hourly_weights{};  // sum to 1
  int total_count = 0;
  double shared_fraction = 0.0;  // passengers only

  void validate() const;  // throws on bad weights
  static DemandProfile load(const std::string& profile_csv, int total_count,
                            double shared_fraction = 0.0);
};

// Optional spatial skew: per-node sampling weights for origins/destinations.
struct SpatialWeights {
  std::vector<double> node_weight;  // by node index, normalized
  static SpatialWeights load(const std::string& file, const Network& net);
};

std::vector<Request> generate_passenger_requests(const DemandProfile& profile,
                                                 const Network& net, std::uint64_t seed,
                                                 int id_start = 0,
                                                 const SpatialWeights* spatial = nullptr);

std::vector<Request> generate_parcel_requests(const DemandProfile& profile,
                                              const Network& net, std::uint64_t seed,
                                              int id_start = 0,
                                              const SpatialWeights* spatial = nullptr);

// CSV `id,kind,origin,dest,request_time_s`; output sorted by request_time.
std::vector<Request> load_requests(const std::string& file, const Network& net);

void write_requests_csv(const std::string& file, const std::vector<Request>& reqs);

}  // namespace hitchsim

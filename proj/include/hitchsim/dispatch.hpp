#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hitchsim/demand.hpp"
#include "hitchsim/network.hpp"

namespace hitchsim {

enum class Strategy { Base, Shr, ShrIdl, ShrRidl };
Strategy strategy_from_string(const std::string& s);
const char* to_string(Strategy s);

struct StrategyConfig {
  Strategy strategy = Strategy::Base;
  double cycle_s = 10;
  double max_passenger_wait_s = 600;
  double parcel_approach_wait_s = 600;
  double idle_eligibility_s = 60;
  double detour_factor = 1.5;
  double dwell_s = 30;
  int seat_capacity = 4;
  bool multi_parcel = true;  // several parcels per vehicle at once
  double am_peak_start = 25200, am_peak_end = 36000;   // 07:00-10:00
  double pm_peak_start = 57600, pm_peak_end = 75600;   // 16:00-21:00
  double midday_start = 36000, midday_end = 57600;     // 10:00-16:00

  bool in_peak(double t) const {
    return (t >= am_peak_start && t < am_peak_end) ||
           (t >= pm_peak_start && t < pm_peak_end);
  }
  bool uses_idle_dispatch() const {
    return strategy == Strategy::ShrIdl || strategy == Strategy::ShrRidl;
  }
  void validate() const;
};

enum class StopAction { Pickup, Dropoff, Cruise, Park };
const char* to_string(StopAction a);

struct ScheduleItem {
  StopAction action = StopAction::Pickup;
  int request_id = -1;  // set for Pickup/Dropoff
  int node = 0;
  double planned_time = 0;
};

enum class Mechanism { SharedInsertion, IdleDispatch, FirstAssignment };
const char* to_string(Mechanism m);

struct AssignmentDecision {
  double t = 0;
  int request_id = -1;
  int vehicle_id = -1;
  Mechanism mechanism = Mechanism::FirstAssignment;
  std::vector<ScheduleItem> schedule;  // candidate, feasible at decision time
};

struct Vehicle {
  int id = 0;
  int seat_capacity = 4;
  int current_node = 0;
  std::vector<ScheduleItem> schedule;  // future stops only
  int locked = 0;                      // leading items already in service (dwelling)
  std::vector<int> onboard;            // request ids, pickup order
  std::optional<double> idle_since;

  // Where and when the vehicle can next be re-planned (set by the engine:
  // now for parked, next node arrival for moving, dwell start for dwelling).
  int plan_node = 0;
  double plan_time = 0;

  bool busy() const { return !schedule.empty() || !onboard.empty(); }
};

// The SMS controller: periodic matching cycles over shared mutable fleet state.
class Controller {
public:
  Controller(const Network& net, Router& router, const StrategyConfig& cfg,
             std::vector<Request>& requests, std::vector<Vehicle>& fleet,
             std::uint64_t seed);

  // Runs one assignment cycle; appends applied decisions to out. Expired
  // passenger requests are marked Failed first.
  void process_cycle(double now, std::vector<AssignmentDecision>& out);

  // First feasible insertion of the request's pickup/dropoff into the
  // vehicle's schedule, scanning positions lexicographically.
  std::optional<std::vector<ScheduleItem>> find_insertion(const Vehicle& v,
                                                          const Request& req, double now);

  // Parcel bracketing under SHR+RIDL: pickup before the first passenger
  // pickup, dropoff after the last passenger dropoff; only that one position.
  std::optional<std::vector<ScheduleItem>> insert_parcel_ridl(const Vehicle& v,
                                                              const Request& parcel,
                                                              double now);

  bool check_feasibility(const std::vector<ScheduleItem>& candidate, const Vehicle& v,
                         const Request& incoming, double now);

  // Vehicle has >=1 passenger onboard or scheduled.
  bool gate_parcel_shr(const Vehicle& v) const;

  // Random eligible idle vehicle for a parcel, or nothing. Peak hours are
  // excluded under SHR+RIDL.
  Vehicle* gate_parcel_idle(const Request& parcel, double now);

  // Direct (no-detour) travel time for a request at its request time; +inf
  // when unreachable. Cached per request.
  double direct_time(const Request& req);

  // Fills planned_time along items from the vehicle's plan anchor; false when
  // some leg is unreachable.
  bool compute_plan_times(const Vehicle& v, std::vector<ScheduleItem>& items);

private:
  // Free-flow lower bounds over the vehicle's committed plan, rebuilt at most
  // once per vehicle per cycle. Insertion candidates whose bound already
  // breaks an absolute deadline (pickup wait cap, onboard dropoff deadline)
  // are rejected without routing; free flow never overestimates, so the
  // first-feasible enumeration result is unchanged.
  struct PlanBound {
    bool ok = false;                // base plan routable
    std::vector<double> base_time;  // planned event time per stop
    std::vector<double> ff_chain;   // cumulative ff leg + dwell offsets
    std::vector<double> min_slack;  // min over suffix of deadline - ff_chain
  };
  const PlanBound& plan_bound(const Vehicle& v);
  double ff(int from_id, int to_id) const {
    return from_id == to_id ? 0.0
                            : ff_[net_->node_index(from_id)][net_->node_index(to_id)];
  }

  bool passenger_committed(const Vehicle& v) const;
  bool single_committed(const Vehicle& v) const;
  void apply(Vehicle& v, Request& req, std::vector<ScheduleItem> schedule, double now,
             Mechanism mech, std::vector<AssignmentDecision>& out);
  bool try_assign_passenger(Request& req, double now, std::vector<AssignmentDecision>& out);
  bool try_assign_parcel(Request& req, double now, std::vector<AssignmentDecision>& out);

  const Network* net_;
  Router* router_;
  const StrategyConfig* cfg_;
  std::vector<Request>* requests_;
  std::vector<Vehicle>* fleet_;
  std::unordered_map<int, int> req_index_;  // request id -> index
  std::vector<double> direct_cache_;
  std::vector<std::vector<double>> ff_;              // all-pairs free-flow
  std::unordered_map<int, PlanBound> bound_cache_;   // by vehicle id, per cycle
  std::mt19937_64 rng_;
};

}  // namespace hitchsim

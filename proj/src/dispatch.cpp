#include "hitchsim/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hitchsim/rng.hpp"

namespace hitchsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "BASE") return Strategy::Base;
  if (s == "SHR") return Strategy::Shr;
  if (s == "SHR_IDL") return Strategy::ShrIdl;
  if (s == "SHR_RIDL") return Strategy::ShrRidl;
  throw std::runtime_error("unknown strategy '" + s + "'");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Base: return "BASE";
    case Strategy::Shr: return "SHR";
    case Strategy::ShrIdl: return "SHR_IDL";
    case Strategy::ShrRidl: return "SHR_RIDL";
  }
  return "?";
}

const char* to_string(StopAction a) {
  switch (a) {
    case StopAction::Pickup: return "PICKUP";
    case StopAction::Dropoff: return "DROPOFF";
    case StopAction::Cruise: return "CRUISE";
    case StopAction::Park: return "PARK";
  }
  return "?";
}

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::SharedInsertion: return "SHARED_INSERTION";
    case Mechanism::IdleDispatch: return "IDLE_DISPATCH";
    case Mechanism::FirstAssignment: return "FIRST_ASSIGNMENT";
  }
  return "?";
}

void StrategyConfig::validate() const {
  if (cycle_s <= 0 || max_passenger_wait_s <= 0 || parcel_approach_wait_s <= 0 ||
      idle_eligibility_s <= 0 || dwell_s < 0 || seat_capacity < 1)
    throw std::runtime_error("strategy config: thresholds must be positive");
  if (detour_factor < 1.0) throw std::runtime_error("detour_factor must be >= 1");
  if (am_peak_end > pm_peak_start)
    throw std::runtime_error("peak windows must be disjoint");
}

Controller::Controller(const Network& net, Router& router, const StrategyConfig& cfg,
                       std::vector<Request>& requests, std::vector<Vehicle>& fleet,
                       std::uint64_t seed)
    : net_(&net),
      router_(&router),
      cfg_(&cfg),
      requests_(&requests),
      fleet_(&fleet),
      rng_(seed) {
  cfg.validate();
  direct_cache_.assign(requests.size(), -1.0);
  for (size_t i = 0; i < requests.size(); ++i) req_index_[requests[i].id] = static_cast<int>(i);
  ff_ = all_pairs_free_flow(net);
}

const Controller::PlanBound& Controller::plan_bound(const Vehicle& v) {
  auto it = bound_cache_.find(v.id);
  if (it != bound_cache_.end()) return it->second;
  PlanBound b;
  const size_t n = v.schedule.size();
  b.base_time.resize(n);
  b.ff_chain.resize(n);
  b.min_slack.assign(n + 1, kInf);
  b.ok = true;
  double t = v.plan_time;
  int node = v.plan_node;
  for (size_t k = 0; k < n && b.ok; ++k) {
    const ScheduleItem& s = v.schedule[k];
    if (s.node != node) {
      double dt = router_->travel_time(node, s.node, t);
      if (dt == kInf) {
        b.ok = false;
        break;
      }
      t += dt;
    }
    t += cfg_->dwell_s;
    b.base_time[k] = t;
    b.ff_chain[k] = (k ? b.ff_chain[k - 1] + ff(v.schedule[k - 1].node, s.node) : 0.0) +
                    (k ? cfg_->dwell_s : 0.0);
    node = s.node;
  }
  if (b.ok) {
    for (size_t k = n; k-- > 0;) {
      double deadline = kInf;
      const ScheduleItem& s = v.schedule[k];
      if (s.request_id >= 0) {
        const Request& q = (*requests_)[req_index_.at(s.request_id)];
        if (q.is_passenger()) {
          if (s.action == StopAction::Pickup && !q.t_pickup)
            deadline = q.request_time + cfg_->max_passenger_wait_s;
          else if (s.action == StopAction::Dropoff && q.t_pickup)
            deadline = *q.t_pickup + cfg_->detour_factor * direct_time(q);
        }
      }
      b.min_slack[k] = std::min(b.min_slack[k + 1], deadline - b.ff_chain[k]);
    }
  }
  return bound_cache_.emplace(v.id, std::move(b)).first->second;
}

double Controller::direct_time(const Request& req) {
  int idx = req_index_.at(req.id);
  if (direct_cache_[idx] < 0)
    direct_cache_[idx] = router_->travel_time(req.origin, req.dest, req.request_time);
  return direct_cache_[idx];
}

bool Controller::compute_plan_times(const Vehicle& v, std::vector<ScheduleItem>& items) {
  double t = v.plan_time;
  int node = v.plan_node;
  for (ScheduleItem& it : items) {
    if (it.node != node) {
      double dt = router_->travel_time(node, it.node, t);
      if (dt == kInf) return false;
      t += dt;
    }
    t += cfg_->dwell_s;
    it.planned_time = t;
    node = it.node;
  }
  return true;
}

bool Controller::check_feasibility(const std::vector<ScheduleItem>& candidate,
                                   const Vehicle& v, const Request& incoming, double now) {
  (void)incoming;
  (void)now;
  // (d) seat occupancy along the whole candidate
  int occ = static_cast<int>(v.onboard.size());
  for (const ScheduleItem& it : candidate) {
    if (it.action == StopAction::Pickup) {
      if (++occ > v.seat_capacity) return false;
    } else if (it.action == StopAction::Dropoff) {
      --occ;
    }
  }

  // planned stop times per request in the candidate
  std::unordered_map<int, double> pick_at, drop_at;
  for (const ScheduleItem& it : candidate) {
    if (it.action == StopAction::Pickup) pick_at[it.request_id] = it.planned_time;
    if (it.action == StopAction::Dropoff) drop_at[it.request_id] = it.planned_time;
  }

  auto passenger_ok = [&](const Request& p) {
    double direct = direct_time(p);
    if (direct == kInf) return false;
    auto d = drop_at.find(p.id);
    if (d == drop_at.end()) return false;  // every commitment needs its dropoff
    auto pk = pick_at.find(p.id);
    if (pk != pick_at.end()) {
      // (a)/(b) waiting cap for not-yet-picked passengers, incoming included
      if (pk->second - p.request_time > cfg_->max_passenger_wait_s + kEps) return false;
      // (c) tolerated delay
      if (d->second - pk->second > cfg_->detour_factor * direct + kEps) return false;
    } else {
      if (!p.t_pickup) return false;
      if (d->second - *p.t_pickup > cfg_->detour_factor * direct + kEps) return false;
    }
    return true;
  };

  for (int rid : v.onboard) {
    const Request& p = (*requests_)[req_index_.at(rid)];
    if (p.is_passenger() && !passenger_ok(p)) return false;
  }
  for (const auto& [rid, t] : drop_at) {
    const Request& p = (*requests_)[req_index_.at(rid)];
    bool onboard = std::find(v.onboard.begin(), v.onboard.end(), rid) != v.onboard.end();
    if (!onboard && p.is_passenger() && !passenger_ok(p)) return false;
  }

  // SHR+RIDL: passengers never experience a parcel stopover
  if (cfg_->strategy == Strategy::ShrRidl) {
    int pax_onboard = 0;
    for (int rid : v.onboard)
      if ((*requests_)[req_index_.at(rid)].is_passenger()) ++pax_onboard;
    for (const ScheduleItem& it : candidate) {
      if (it.action != StopAction::Pickup && it.action != StopAction::Dropoff) continue;
      const Request& r = (*requests_)[req_index_.at(it.request_id)];
      if (!r.is_passenger()) {
        if (pax_onboard > 0) return false;
      } else {
        pax_onboard += it.action == StopAction::Pickup ? 1 : -1;
      }
    }
  }
  return true;
}

std::optional<std::vector<ScheduleItem>> Controller::find_insertion(const Vehicle& v,
                                                                    const Request& req,
                                                                    double now) {
  const int n = static_cast<int>(v.schedule.size());
  ScheduleItem pick{StopAction::Pickup, req.id, req.origin, 0};
  ScheduleItem drop{StopAction::Dropoff, req.id, req.dest, 0};
  const PlanBound& pb = plan_bound(v);
  const bool prune = pb.ok;  // unroutable base plan: no bounds, enumerate raw
  const double dl_in =
      req.is_passenger() ? req.request_time + cfg_->max_passenger_wait_s : kInf;
  for (int i = v.locked; i <= n; ++i) {
    double arrive_pick = 0, t_i = 0;
    if (prune) {
      double dep_prev = i == 0 ? v.plan_time : pb.base_time[i - 1];
      int a = i == 0 ? v.plan_node : v.schedule[i - 1].node;
      arrive_pick = dep_prev + ff(a, req.origin) + cfg_->dwell_s;
      if (arrive_pick > dl_in + kEps) continue;
      if (i < n) {
        t_i = arrive_pick + ff(req.origin, v.schedule[i].node) + cfg_->dwell_s;
        if (t_i - pb.ff_chain[i] > pb.min_slack[i] + kEps) continue;
      }
    }
    for (int j = i; j <= n; ++j) {
      if (prune && j < n) {
        double drop_lb = j == i
                             ? arrive_pick + ff(req.origin, req.dest) + cfg_->dwell_s
                             : t_i + (pb.ff_chain[j - 1] - pb.ff_chain[i]) +
                                   ff(v.schedule[j - 1].node, req.dest) + cfg_->dwell_s;
        double t_j = drop_lb + ff(req.dest, v.schedule[j].node) + cfg_->dwell_s;
        if (t_j - pb.ff_chain[j] > pb.min_slack[j] + kEps) continue;
      }
      std::vector<ScheduleItem> cand;
      cand.reserve(n + 2);
      cand.insert(cand.end(), v.schedule.begin(), v.schedule.begin() + i);
      cand.push_back(pick);
      cand.insert(cand.end(), v.schedule.begin() + i, v.schedule.begin() + j);
      cand.push_back(drop);
      cand.insert(cand.end(), v.schedule.begin() + j, v.schedule.end());
      if (!compute_plan_times(v, cand)) continue;
      if (check_feasibility(cand, v, req, now)) return cand;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<ScheduleItem>> Controller::insert_parcel_ridl(const Vehicle& v,
                                                                        const Request& parcel,
                                                                        double now) {
  for (int rid : v.onboard)
    if ((*requests_)[req_index_.at(rid)].is_passenger()) return std::nullopt;
  // single bracketing position: pickup ahead of everything still movable,
  // dropoff after the last stop
  for (int k = 0; k < v.locked; ++k)
    if (v.schedule[k].action == StopAction::Pickup &&
        (*requests_)[req_index_.at(v.schedule[k].request_id)].is_passenger())
      return std::nullopt;  // first passenger pickup already in service
  std::vector<ScheduleItem> cand;
  cand.reserve(v.schedule.size() + 2);
  cand.insert(cand.end(), v.schedule.begin(), v.schedule.begin() + v.locked);
  cand.push_back({StopAction::Pickup, parcel.id, parcel.origin, 0});
  cand.insert(cand.end(), v.schedule.begin() + v.locked, v.schedule.end());
  cand.push_back({StopAction::Dropoff, parcel.id, parcel.dest, 0});
  if (!compute_plan_times(v, cand)) return std::nullopt;
  if (!check_feasibility(cand, v, parcel, now)) return std::nullopt;
  return cand;
}

bool Controller::passenger_committed(const Vehicle& v) const {
  for (int rid : v.onboard)
    if ((*requests_)[req_index_.at(rid)].is_passenger()) return true;
  for (const ScheduleItem& it : v.schedule)
    if (it.request_id >= 0 && (*requests_)[req_index_.at(it.request_id)].is_passenger())
      return true;
  return false;
}

bool Controller::single_committed(const Vehicle& v) const {
  for (int rid : v.onboard)
    if ((*requests_)[req_index_.at(rid)].kind == RequestKind::PassengerSingle) return true;
  for (const ScheduleItem& it : v.schedule)
    if (it.request_id >= 0 &&
        (*requests_)[req_index_.at(it.request_id)].kind == RequestKind::PassengerSingle)
      return true;
  return false;
}

bool Controller::gate_parcel_shr(const Vehicle& v) const { return passenger_committed(v); }

Vehicle* Controller::gate_parcel_idle(const Request& parcel, double now) {
  if (cfg_->strategy == Strategy::ShrRidl && cfg_->in_peak(now)) return nullptr;
  std::vector<Vehicle*> eligible;
  for (Vehicle& v : *fleet_) {
    if (v.busy() || !v.idle_since) continue;
    if (now - *v.idle_since < cfg_->idle_eligibility_s) continue;
    double approach = router_->travel_time(v.current_node, parcel.origin, now);
    if (approach > cfg_->parcel_approach_wait_s) continue;
    eligible.push_back(&v);
  }
  if (eligible.empty()) return nullptr;
  return eligible[bounded(rng_, eligible.size())];
}

void Controller::apply(Vehicle& v, Request& req, std::vector<ScheduleItem> schedule,
                       double now, Mechanism mech, std::vector<AssignmentDecision>& out) {
  out.push_back({now, req.id, v.id, mech, schedule});
  bound_cache_.erase(v.id);  // schedule changes invalidate the cycle's bounds
  v.schedule = std::move(schedule);
  v.idle_since.reset();
  req.state = RequestState::Assigned;
  req.t_assigned = now;
  req.assigned_vehicle = v.id;
}

bool Controller::try_assign_passenger(Request& req, double now,
                                      std::vector<AssignmentDecision>& out) {
  if (req.kind == RequestKind::PassengerShared) {
    // shared-first: vehicles already serving requests, fleet order
    for (Vehicle& v : *fleet_) {
      if (!v.busy() || single_committed(v)) continue;
      if (auto cand = find_insertion(v, req, now)) {
        apply(v, req, std::move(*cand), now, Mechanism::SharedInsertion, out);
        return true;
      }
    }
  }
  for (Vehicle& v : *fleet_) {
    if (v.busy()) continue;
    if (auto cand = find_insertion(v, req, now)) {
      apply(v, req, std::move(*cand), now, Mechanism::FirstAssignment, out);
      return true;
    }
  }
  return false;
}

bool Controller::try_assign_parcel(Request& req, double now,
                                   std::vector<AssignmentDecision>& out) {
  for (Vehicle& v : *fleet_) {
    if (!gate_parcel_shr(v) || single_committed(v)) continue;
    if (!cfg_->multi_parcel) {
      bool has_parcel = false;
      for (int rid : v.onboard)
        has_parcel |= !(*requests_)[req_index_.at(rid)].is_passenger();
      for (const ScheduleItem& it : v.schedule)
        if (it.request_id >= 0)
          has_parcel |= !(*requests_)[req_index_.at(it.request_id)].is_passenger();
      if (has_parcel) continue;
    }
    auto cand = cfg_->strategy == Strategy::ShrRidl ? insert_parcel_ridl(v, req, now)
                                                    : find_insertion(v, req, now);
    if (cand) {
      apply(v, req, std::move(*cand), now, Mechanism::SharedInsertion, out);
      return true;
    }
  }
  if (cfg_->uses_idle_dispatch()) {
    if (Vehicle* v = gate_parcel_idle(req, now)) {
      auto cand = cfg_->strategy == Strategy::ShrRidl ? insert_parcel_ridl(*v, req, now)
                                                      : find_insertion(*v, req, now);
      if (cand) {
        apply(*v, req, std::move(*cand), now, Mechanism::IdleDispatch, out);
        return true;
      }
    }
  }
  return false;
}

void Controller::process_cycle(double now, std::vector<AssignmentDecision>& out) {
  bound_cache_.clear();  // plan anchors move between cycles
  // expire overdue passenger requests first
  for (Request& req : *requests_) {
    if (req.state != RequestState::Pending || !req.is_passenger()) continue;
    if (req.request_time > now) break;  // requests are time-ordered
    if (now - req.request_time > cfg_->max_passenger_wait_s) {
      req.state = RequestState::Failed;
      req.t_failed = now;
      req.fail_reason = "wait_expired";
    }
  }
  for (Request& req : *requests_) {
    if (req.request_time > now) break;
    if (req.state != RequestState::Pending) continue;
    if (direct_time(req) == kInf) {
      req.state = RequestState::Failed;
      req.t_failed = now;
      req.fail_reason = "unreachable";
      continue;
    }
    if (req.is_passenger()) {
      try_assign_passenger(req, now, out);
    } else if (cfg_->strategy != Strategy::Base) {
      try_assign_parcel(req, now, out);
    }
  }
}

}  // namespace hitchsim

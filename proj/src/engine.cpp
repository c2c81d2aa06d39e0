#include "hitchsim/engine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "hitchsim/freight.hpp"
#include "hitchsim/rng.hpp"

namespace hitchsim {

const char* to_string(EventType e) {
  switch (e) {
    case EventType::Pickup: return "PICKUP";
    case EventType::Dropoff: return "DROPOFF";
    case EventType::Depart: return "DEPART";
    case EventType::Park: return "PARK";
  }
  return "?";
}

namespace {

struct Motion {
  enum class S { Parked, Moving, Dwelling } s = S::Parked;
  int link = -1;       // link index while Moving
  double event_time = 0;
};

struct PendingEvent {
  double t;
  long seq;
  int vehicle;
  bool operator>(const PendingEvent& o) const {
    return std::tie(t, seq) > std::tie(o.t, o.seq);
  }
};

class DayRunner {
public:
  DayRunner(const Network& net, const TravelTimeField& field,
            const std::vector<Request>& requests, const SimConfig& cfg, std::uint64_t seed)
      : net_(net), field_(field), cfg_(cfg), router_(net, field) {
    log_.requests = requests;
    std::stable_sort(log_.requests.begin(), log_.requests.end(),
                     [](const Request& a, const Request& b) {
                       return std::tie(a.request_time, a.id) < std::tie(b.request_time, b.id);
                     });
    for (size_t i = 1; i < log_.requests.size(); ++i)
      if (log_.requests[i].id == log_.requests[i - 1].id &&
          log_.requests[i].request_time == log_.requests[i - 1].request_time)
        throw std::runtime_error("duplicate request id " + std::to_string(log_.requests[i].id));

    std::mt19937_64 place_rng(seed);
    fleet_.reserve(cfg.fleet_size);
    for (int i = 0; i < cfg.fleet_size; ++i) {
      Vehicle v;
      v.id = i;
      v.seat_capacity = cfg.strategy.seat_capacity;
      v.current_node = net.nodes()[bounded(place_rng, net.nodes().size())].id;
      v.idle_since = 0.0;
      v.plan_node = v.current_node;
      v.plan_time = 0.0;
      fleet_.push_back(v);
      log_.vehicle_start_nodes.push_back(v.current_node);
    }
    motion_.resize(fleet_.size());
    ctrl_.emplace(net, router_, cfg.strategy, log_.requests, fleet_,
                  seed ^ 0x9e3779b97f4a7c15ULL);
    volumes_ = VolumeGrid(static_cast<int>(net.links().size()), field.bin_width());
  }

  RunLog run() {
    const double cycle = cfg_.strategy.cycle_s;
    for (double now = 0; now < kDaySeconds; now += cycle) {
      drain(now);
      for (Vehicle& v : fleet_) {
        if (motion_[v.id].s == Motion::S::Parked) {
          v.plan_node = v.current_node;
          v.plan_time = now;
        }
      }
      size_t before = log_.decisions.size();
      ctrl_->process_cycle(now, log_.decisions);
      for (size_t i = before; i < log_.decisions.size(); ++i) {
        int vi = log_.decisions[i].vehicle_id;
        if (motion_[vi].s == Motion::S::Parked && !fleet_[vi].schedule.empty()) {
          log_.events.push_back({now, vi, EventType::Depart, -1, fleet_[vi].current_node});
          next_leg(vi, now);
        }
      }
    }
    drain(std::numeric_limits<double>::infinity());
    return std::move(log_);
  }

  VolumeGrid take_volumes() { return std::move(volumes_); }

private:
  void push_event(int vi, double t) { queue_.push({t, seq_++, vi}); }

  void drain(double until) {
    while (!queue_.empty() && queue_.top().t <= until) {
      PendingEvent ev = queue_.top();
      queue_.pop();
      Motion& m = motion_[ev.vehicle];
      if (ev.t != m.event_time) continue;  // superseded
      on_event(ev.vehicle, ev.t);
    }
  }

  Request& req_by_id(int id) {
    if (req_index_.empty())
      for (size_t i = 0; i < log_.requests.size(); ++i)
        req_index_[log_.requests[i].id] = static_cast<int>(i);
    return log_.requests[req_index_.at(id)];
  }

  void enter_link(int vi, int li, double t) {
    Vehicle& v = fleet_[vi];
    Motion& m = motion_[vi];
    double dt = field_.at(li, t);
    volumes_.count[li][field_.bin_of(t)] += 1.0;
    log_.traversals.push_back({v.id, li, t, t + dt});
    m.s = Motion::S::Moving;
    m.link = li;
    m.event_time = t + dt;
    v.plan_node = net_.links()[li].to;
    v.plan_time = t + dt;
    push_event(vi, m.event_time);
  }

  void fail_schedule(int vi, double t) {
    // a scheduled stop became unreachable; close out affected requests
    Vehicle& v = fleet_[vi];
    for (const ScheduleItem& it : v.schedule) {
      if (it.request_id < 0) continue;
      Request& r = req_by_id(it.request_id);
      if (r.state == RequestState::Assigned || r.state == RequestState::Onboard) {
        r.state = RequestState::Failed;
        r.t_failed = t;
        r.fail_reason = "unreachable_leg";
      }
    }
    v.schedule.clear();
    v.locked = 0;
    v.onboard.clear();
  }

  void next_leg(int vi, double t) {
    Vehicle& v = fleet_[vi];
    Motion& m = motion_[vi];
    if (v.schedule.empty()) {
      m.s = Motion::S::Parked;
      m.link = -1;
      v.idle_since = t;
      v.plan_node = v.current_node;
      v.plan_time = t;
      log_.events.push_back({t, v.id, EventType::Park, -1, v.current_node});
      return;
    }
    int target = v.schedule.front().node;
    if (v.current_node == target) {
      m.s = Motion::S::Dwelling;
      m.event_time = t + cfg_.strategy.dwell_s;
      v.locked = 1;
      v.plan_node = v.current_node;
      v.plan_time = t;  // dwell start; planning adds dwell itself
      push_event(vi, m.event_time);
      return;
    }
    auto route = router_.route(v.current_node, target, t);
    if (!route || route->links.empty()) {
      fail_schedule(vi, t);
      next_leg(vi, t);
      return;
    }
    enter_link(vi, route->links.front(), t);
  }

  void on_event(int vi, double t) {
    Vehicle& v = fleet_[vi];
    Motion& m = motion_[vi];
    if (m.s == Motion::S::Moving) {
      v.current_node = net_.links()[m.link].to;
      next_leg(vi, t);
    } else if (m.s == Motion::S::Dwelling) {
      ScheduleItem it = v.schedule.front();
      v.schedule.erase(v.schedule.begin());
      v.locked = 0;
      Request& r = req_by_id(it.request_id);
      if (it.action == StopAction::Pickup) {
        r.state = RequestState::Onboard;
        r.t_pickup = t;
        v.onboard.push_back(r.id);
        log_.events.push_back({t, v.id, EventType::Pickup, r.id, v.current_node});
      } else {
        r.state = RequestState::Completed;
        r.t_dropoff = t;
        v.onboard.erase(std::find(v.onboard.begin(), v.onboard.end(), r.id));
        log_.events.push_back({t, v.id, EventType::Dropoff, r.id, v.current_node});
      }
      next_leg(vi, t);
    }
  }

  const Network& net_;
  const TravelTimeField& field_;
  const SimConfig& cfg_;
  Router router_;
  RunLog log_;
  std::vector<Vehicle> fleet_;
  std::vector<Motion> motion_;
  std::optional<Controller> ctrl_;
  VolumeGrid volumes_;
  std::priority_queue<PendingEvent, std::vector<PendingEvent>, std::greater<>> queue_;
  std::unordered_map<int, int> req_index_;
  long seq_ = 0;
};

}  // namespace

RunLog run_day(const Network& net, const TravelTimeField& field,
               const std::vector<Request>& requests, const SimConfig& cfg,
               std::uint64_t seed, VolumeGrid* volumes_out) {
  DayRunner runner(net, field, requests, cfg, seed);
  RunLog log = runner.run();
  if (volumes_out) *volumes_out = runner.take_volumes();
  return log;
}

ReplicationResult run_with_learning(const Network& net, const std::vector<Request>& requests,
                                    const SimConfig& cfg, std::uint64_t seed,
                                    const VolumeGrid* background) {
  if (cfg.learning_iterations < 1) throw std::runtime_error("iterations must be >= 1");
  TravelTimeField field(net, cfg.bin_width_s);
  if (background && !background->background_vph.empty()) {
    // pre-congest with the static background so even single-pass runs see it
    VolumeGrid bg(static_cast<int>(net.links().size()), cfg.bin_width_s);
    bg.background_vph = background->background_vph;
    field = within_day_update(net, field, bg, 1);
  }
  ReplicationResult res;
  res.seed = seed;
  for (int k = 1;; ++k) {
    VolumeGrid vols(static_cast<int>(net.links().size()), cfg.bin_width_s);
    res.log = run_day(net, field, requests, cfg, seed, &vols);
    // run_day replaces the grid with the runner's traversal counts, so the
    // static background has to be re-attached before the MSA update sees it
    if (background) vols.background_vph = background->background_vph;
    res.volumes = std::move(vols);
    res.field = field;
    if (k == cfg.learning_iterations) break;
    TravelTimeField next = within_day_update(net, field, res.volumes, k);
    double change = field_relative_change(field, next);
    if (change < cfg.learning_tolerance) break;
    field = std::move(next);
  }
  return res;
}

ScenarioResult run_scenario(const Network& net, const std::vector<Request>& requests,
                            const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                            const VolumeGrid* background, const std::string& depots_file) {
  if (seeds.empty()) throw std::runtime_error("need at least one seed");

  std::vector<Request> parcels;
  for (const Request& r : requests)
    if (r.kind == RequestKind::Parcel) parcels.push_back(r);

  // Carrier tours are built on the initial field (free flow plus background),
  // identical across scenarios, so carrier deltas isolate the offload effect.
  TravelTimeField tour_field(net, cfg.bin_width_s);
  if (background && !background->background_vph.empty()) {
    VolumeGrid bg(static_cast<int>(net.links().size()), cfg.bin_width_s);
    bg.background_vph = background->background_vph;
    tour_field = within_day_update(net, tour_field, bg, 1);
  }
  std::vector<Depot> depots;
  std::vector<CarrierTour> baseline_tours;
  if (!depots_file.empty()) {
    depots = load_depots(depots_file, net);
    baseline_tours = build_tours(parcels, depots, net, tour_field);
  }

  std::vector<std::uint64_t> ordered = seeds;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  ScenarioResult out;
  std::vector<std::pair<std::uint64_t, MetricsReport>> reports;
  for (std::uint64_t seed : ordered) {
    ReplicationResult rep = run_with_learning(net, requests, cfg, seed, background);
    rep.report = compute_metrics(net, rep.log, cfg.strategy, cfg.fleet_size);
    if (!depots.empty()) {
      std::vector<int> served;
      for (const Request& r : rep.log.requests)
        if (r.kind == RequestKind::Parcel && r.state == RequestState::Completed)
          served.push_back(r.id);
      std::vector<Request> remaining = offload(parcels, served);
      rep.carrier_tours = build_tours(remaining, depots, net, tour_field);
      add_carrier_metrics(rep.report, rep.carrier_tours, baseline_tours);
    }
    reports.emplace_back(seed, rep.report);
    out.replications.push_back(std::move(rep));
  }
  out.averaged = average_reports(std::move(reports));
  out.baseline_tours = std::move(baseline_tours);
  return out;
}

}  // namespace hitchsim

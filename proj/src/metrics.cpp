#include "hitchsim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hitchsim {

namespace {

struct Period {
  const char* name;
  std::vector<std::pair<double, double>> windows;
  bool contains(double t) const {
    for (auto [lo, hi] : windows)
      if (t >= lo && t < hi) return true;
    return false;
  }
};

std::vector<Period> make_periods(const StrategyConfig& cfg) {
  return {
      {"am", {{cfg.am_peak_start, cfg.am_peak_end}}},
      {"midday", {{cfg.midday_start, cfg.midday_end}}},
      {"pm", {{cfg.pm_peak_start, cfg.pm_peak_end}}},
      {"peak", {{cfg.am_peak_start, cfg.am_peak_end}, {cfg.pm_peak_start, cfg.pm_peak_end}}},
      {"daily", {{0.0, kDaySeconds}}},
  };
}

const char* kind_key(RequestKind k) {
  switch (k) {
    case RequestKind::PassengerSingle: return "single";
    case RequestKind::PassengerShared: return "shared";
    case RequestKind::Parcel: return "parcel";
  }
  return "?";
}

// Busy spans per vehicle from paired Depart/Park events, chronological.
std::vector<std::vector<std::pair<double, double>>> busy_spans(const RunLog& log,
                                                               int fleet_size) {
  std::vector<std::vector<std::pair<double, double>>> spans(fleet_size);
  constexpr double kOpen = -1.0;
  std::vector<double> open(fleet_size, kOpen);
  for (const EventRecord& e : log.events) {
    if (e.type == EventType::Depart) {
      open[e.vehicle_id] = e.t;
    } else if (e.type == EventType::Park) {
      if (open[e.vehicle_id] >= 0) {
        spans[e.vehicle_id].emplace_back(open[e.vehicle_id], e.t);
        open[e.vehicle_id] = kOpen;
      }
    }
  }
  for (int v = 0; v < fleet_size; ++v)
    if (open[v] >= 0) spans[v].emplace_back(open[v], std::numeric_limits<double>::infinity());
  return spans;
}

bool in_spans(const std::vector<std::pair<double, double>>& spans, double t) {
  for (auto [lo, hi] : spans)
    if (t >= lo && t < hi) return true;
  return false;
}

}  // namespace

MetricsReport compute_metrics(const Network& net, const RunLog& log,
                              const StrategyConfig& cfg, int fleet_size) {
  MetricsReport rep;
  auto& s = rep.scalars;
  const auto periods = make_periods(cfg);

  // request counts and period means, in request order
  for (const char* k : {"single", "shared", "parcel"}) {
    s[std::string("total_") + k] = 0;
    s[std::string("served_") + k] = 0;
    s[std::string("failed_") + k] = 0;
    s[std::string("pending_") + k] = 0;
  }
  for (const Request& r : log.requests) {
    std::string k = kind_key(r.kind);
    s["total_" + k] += 1;
    if (r.state == RequestState::Completed)
      s["served_" + k] += 1;
    else if (r.state == RequestState::Failed)
      s["failed_" + k] += 1;
    else
      s["pending_" + k] += 1;
  }
  s["total_passenger"] = s["total_single"] + s["total_shared"];
  s["served_passenger"] = s["served_single"] + s["served_shared"];
  s["failed_passenger"] = s["failed_single"] + s["failed_shared"];
  s["pending_passenger"] = s["pending_single"] + s["pending_shared"];
  s["demand_served_total"] = s["served_passenger"] + s["served_parcel"];

  for (const char* k : {"single", "shared", "parcel"}) {
    for (const Period& p : periods) {
      double wait_sum = 0, travel_sum = 0;
      long n = 0;
      for (const Request& r : log.requests) {
        if (std::string(kind_key(r.kind)) != k) continue;
        if (r.state != RequestState::Completed) continue;
        if (!p.contains(r.request_time)) continue;
        wait_sum += *r.t_pickup - r.request_time;
        travel_sum += *r.t_dropoff - *r.t_pickup;
        ++n;
      }
      if (n > 0) {
        s[std::string("mean_wait_s_") + k + "_" + p.name] = wait_sum / n;
        s[std::string("mean_travel_s_") + k + "_" + p.name] = travel_sum / n;
      }
    }
  }

  // operator distance/time and network figures from the traversal log
  double dist_sum = 0, time_sum = 0, tti_w = 0, tti_wt = 0, tti_wp = 0, tti_wtp = 0;
  for (const Traversal& tr : log.traversals) {
    const Link& l = net.links()[tr.link_idx];
    double dt = tr.t_exit - tr.t_entry;
    dist_sum += l.length_m;
    time_sum += dt;
    double w = l.length_m;
    tti_w += w;
    tti_wt += w * (dt / l.free_flow_time());
    bool peak = (tr.t_entry >= cfg.am_peak_start && tr.t_entry < cfg.am_peak_end) ||
                (tr.t_entry >= cfg.pm_peak_start && tr.t_entry < cfg.pm_peak_end);
    if (peak) {
      tti_wp += w;
      tti_wtp += w * (dt / l.free_flow_time());
    }
  }
  s["mod_distance_km"] = dist_sum / 1000.0;
  s["mod_vht_h"] = time_sum / 3600.0;
  s["tti_weighted_daily"] = tti_w > 0 ? tti_wt / tti_w : 1.0;
  s["tti_weighted_peak"] = tti_wp > 0 ? tti_wtp / tti_wp : 1.0;
  s["total_vkt_km"] = s["mod_distance_km"];
  s["total_vht_h"] = s["mod_vht_h"];

  // utilization: busy-vehicle fraction sampled on a 60 s grid
  const auto spans = busy_spans(log, fleet_size);
  for (const Period& p : periods) {
    long busy = 0, samples = 0;
    for (auto [lo, hi] : p.windows) {
      for (double t = lo; t < hi; t += 60.0) {
        ++samples;
        for (int v = 0; v < fleet_size; ++v)
          if (in_spans(spans[v], t)) ++busy;
      }
    }
    if (samples > 0)
      s[std::string("utilization_") + p.name] =
          static_cast<double>(busy) / (static_cast<double>(fleet_size) * samples);
  }

  // 5-minute series
  std::vector<std::vector<std::pair<double, double>>> onboard_spans(fleet_size);
  for (const Request& r : log.requests) {
    if (!r.assigned_vehicle || !r.t_pickup) continue;
    double drop = r.t_dropoff ? *r.t_dropoff : std::numeric_limits<double>::infinity();
    if (*r.assigned_vehicle >= 0 && *r.assigned_vehicle < fleet_size)
      onboard_spans[*r.assigned_vehicle].emplace_back(*r.t_pickup, drop);
  }
  for (double t = 0; t < kDaySeconds; t += 300.0) {
    StatusSample st{t, 0, 0, 0, 0};
    for (int v = 0; v < fleet_size; ++v) {
      if (!in_spans(spans[v], t))
        ++st.idle;
      else if (in_spans(onboard_spans[v], t))
        ++st.serving;
      else
        ++st.cruising;
    }
    rep.status_series.push_back(st);

    FulfilmentSample fu{t, 0, 0, 0, 0};
    for (const Request& r : log.requests) {
      bool assigned_by = r.t_assigned && *r.t_assigned <= t;
      bool failed_by = r.t_failed && *r.t_failed <= t;
      bool pending = r.request_time <= t && !assigned_by && !failed_by;
      bool served_by = r.t_dropoff && *r.t_dropoff <= t;
      if (r.is_passenger()) {
        fu.pending_passenger += pending;
        fu.served_passenger += served_by;
      } else {
        fu.pending_parcel += pending;
        fu.served_parcel += served_by;
      }
    }
    rep.fulfilment_series.push_back(fu);
  }
  return rep;
}

void add_carrier_metrics(MetricsReport& rep, const std::vector<CarrierTour>& offloaded,
                         const std::vector<CarrierTour>& baseline) {
  auto& s = rep.scalars;
  CarrierMetrics off = carrier_metrics(offloaded);
  CarrierMetrics base = carrier_metrics(baseline);
  s["carrier_driving_h"] = off.driving_time_h;
  s["carrier_vkt_km"] = off.vkt_km;
  s["carrier_trips"] = off.trip_count;
  s["carrier_baseline_driving_h"] = base.driving_time_h;
  s["carrier_baseline_vkt_km"] = base.vkt_km;
  s["carrier_baseline_trips"] = base.trip_count;
  s["total_vkt_km"] = s["mod_distance_km"] + off.vkt_km;
  s["total_vht_h"] = s["mod_vht_h"] + off.driving_time_h;
}

MetricsReport average_reports(std::vector<std::pair<std::uint64_t, MetricsReport>> by_seed) {
  std::sort(by_seed.begin(), by_seed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  MetricsReport out;
  std::map<std::string, std::pair<double, long>> acc;
  for (const auto& [seed, rep] : by_seed)
    for (const auto& [k, v] : rep.scalars) {
      acc[k].first += v;
      acc[k].second += 1;
    }
  for (const auto& [k, sv] : acc) out.scalars[k] = sv.first / sv.second;
  return out;
}

void write_metrics_json(const std::string& path, const MetricsReport& r) {
  nlohmann::json j;
  j["scalars"] = r.scalars;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

namespace {

void write_rows(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "metric,value\n";
  for (const auto& [k, v] : rows) out << k << "," << v << "\n";
}

std::string fmt(const MetricsReport& r, const std::string& key, double scale = 1.0) {
  auto it = r.scalars.find(key);
  if (it == r.scalars.end()) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", it->second * scale);
  return buf;
}

}  // namespace

void write_tables_csv(const std::string& dir, const MetricsReport& r) {
  const double s2min = 1.0 / 60.0;
  write_rows(dir + "/table1.csv",
             {{"requests_served_shared", fmt(r, "served_shared")},
              {"peak_travel_min", fmt(r, "mean_travel_s_shared_peak", s2min)},
              {"midday_travel_min", fmt(r, "mean_travel_s_shared_midday", s2min)},
              {"peak_wait_min", fmt(r, "mean_wait_s_shared_peak", s2min)},
              {"midday_wait_min", fmt(r, "mean_wait_s_shared_midday", s2min)}});
  write_rows(dir + "/table2.csv",
             {{"parcel_requests_served", fmt(r, "served_parcel")},
              {"am_peak_wait_min", fmt(r, "mean_wait_s_parcel_am", s2min)},
              {"midday_wait_min", fmt(r, "mean_wait_s_parcel_midday", s2min)},
              {"pm_peak_wait_min", fmt(r, "mean_wait_s_parcel_pm", s2min)},
              {"carrier_driving_h", fmt(r, "carrier_driving_h")},
              {"carrier_baseline_driving_h", fmt(r, "carrier_baseline_driving_h")}});
  write_rows(dir + "/table3.csv",
             {{"demand_served_total", fmt(r, "demand_served_total")},
              {"distance_travelled_km", fmt(r, "mod_distance_km")},
              {"vehicle_utilization_peak", fmt(r, "utilization_peak")},
              {"vehicle_utilization_midday", fmt(r, "utilization_midday")}});
  write_rows(dir + "/table4.csv",
             {{"total_vht_h", fmt(r, "total_vht_h")},
              {"total_vkt_km", fmt(r, "total_vkt_km")},
              {"tti_weighted_average", fmt(r, "tti_weighted_daily")},
              {"tti_weighted_peak", fmt(r, "tti_weighted_peak")}});
}

void write_series_csv(const std::string& dir, const MetricsReport& r) {
  {
    std::ofstream out(dir + "/fig6_status.csv");
    if (!out) throw std::runtime_error("cannot write fig6_status.csv");
    out << "t,idle,cruising,serving,parking\n";
    for (const StatusSample& s : r.status_series)
      out << s.t << "," << s.idle << "," << s.cruising << "," << s.serving << ","
          << s.parking << "\n";
  }
  {
    std::ofstream out(dir + "/fig7_requests.csv");
    if (!out) throw std::runtime_error("cannot write fig7_requests.csv");
    out << "t,pending_passenger,pending_parcel,served_passenger,served_parcel\n";
    for (const FulfilmentSample& s : r.fulfilment_series)
      out << s.t << "," << s.pending_passenger << "," << s.pending_parcel << ","
          << s.served_passenger << "," << s.served_parcel << "\n";
  }
}

}  // namespace hitchsim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hitchsim/metrics.hpp"

using namespace hitchsim;

namespace {

Network line_network(int n) {
  std::vector<Node> nodes;
  std::vector<Link> links;
  for (int i = 0; i < n; ++i) nodes.push_back({i + 1, i * 1000.0, 0});
  int id = 1;
  for (int i = 0; i + 1 < n; ++i) {
    links.push_back({id++, i + 1, i + 2, 1000, 10, 600, 0.15, 4});
    links.push_back({id++, i + 2, i + 1, 1000, 10, 600, 0.15, 4});
  }
  return Network::build(std::move(nodes), std::move(links));
}

Request done_request(int id, RequestKind kind, double t_req, double t_pick, double t_drop,
                     int veh = 0) {
  Request r;
  r.id = id;
  r.kind = kind;
  r.origin = 1;
  r.dest = 3;
  r.request_time = t_req;
  r.state = RequestState::Completed;
  r.assigned_vehicle = veh;
  r.t_assigned = t_req;
  r.t_pickup = t_pick;
  r.t_dropoff = t_drop;
  return r;
}

}  // namespace

TEST_CASE("counts, waits and travel times from a hand-built log") {
  Network net = line_network(3);
  StrategyConfig cfg;
  RunLog log;
  log.requests.push_back(done_request(1, RequestKind::PassengerSingle, 100, 400, 1000));
  log.requests.push_back(done_request(2, RequestKind::PassengerShared, 200, 500, 900));
  Request failed;
  failed.id = 3;
  failed.kind = RequestKind::PassengerShared;
  failed.request_time = 300;
  failed.state = RequestState::Failed;
  failed.t_failed = 901;
  log.requests.push_back(failed);
  Request pending;
  pending.id = 4;
  pending.kind = RequestKind::Parcel;
  pending.request_time = 50;
  log.requests.push_back(pending);

  MetricsReport rep = compute_metrics(net, log, cfg, 2);
  auto& s = rep.scalars;
  CHECK(s.at("total_single") == 1);
  CHECK(s.at("total_shared") == 2);
  CHECK(s.at("total_parcel") == 1);
  CHECK(s.at("served_single") == 1);
  CHECK(s.at("served_shared") == 1);
  CHECK(s.at("failed_shared") == 1);
  CHECK(s.at("pending_parcel") == 1);
  CHECK(s.at("total_passenger") == 3);
  CHECK(s.at("served_passenger") == 2);
  CHECK(s.at("demand_served_total") == 2);

  // wait = pickup - request, travel = dropoff - pickup, completed only
  CHECK(s.at("mean_wait_s_single_daily") == doctest::Approx(300.0));
  CHECK(s.at("mean_travel_s_single_daily") == doctest::Approx(600.0));
  CHECK(s.at("mean_wait_s_shared_daily") == doctest::Approx(300.0));
  CHECK(s.at("mean_travel_s_shared_daily") == doctest::Approx(400.0));

  // no completed parcel, no peak-hour completions: those keys must be absent
  CHECK(!s.count("mean_wait_s_parcel_daily"));
  CHECK(!s.count("mean_wait_s_single_peak"));
  CHECK(!s.count("mean_wait_s_single_am"));

  // nothing drove: zero distance, neutral TTI
  CHECK(s.at("mod_distance_km") == 0.0);
  CHECK(s.at("tti_weighted_daily") == 1.0);
  CHECK(s.at("tti_weighted_peak") == 1.0);
}

TEST_CASE("period means key off the request time") {
  Network net = line_network(3);
  StrategyConfig cfg;  // am peak 07:00-10:00
  RunLog log;
  // requested in the AM peak, completed at midday: counts toward am, not midday
  log.requests.push_back(
      done_request(1, RequestKind::PassengerShared, 35000, 35200, 39000));
  MetricsReport rep = compute_metrics(net, log, cfg, 1);
  CHECK(rep.scalars.at("mean_wait_s_shared_am") == doctest::Approx(200.0));
  CHECK(rep.scalars.at("mean_wait_s_shared_peak") == doctest::Approx(200.0));
  CHECK(!rep.scalars.count("mean_wait_s_shared_midday"));
  CHECK(!rep.scalars.count("mean_wait_s_shared_pm"));
}

TEST_CASE("TTI is a distance-weighted mean over traversals") {
  Network net = line_network(3);  // every link 1000 m, fft 100 s
  StrategyConfig cfg;
  RunLog log;
  log.traversals.push_back({0, 0, 40000.0, 40100.0});  // at free flow
  log.traversals.push_back({0, 1, 40100.0, 40300.0});  // doubled
  MetricsReport rep = compute_metrics(net, log, cfg, 1);
  CHECK(rep.scalars.at("tti_weighted_daily") == doctest::Approx(1.5));
  CHECK(rep.scalars.at("tti_weighted_peak") == 1.0);  // 11:06 is off-peak
  CHECK(rep.scalars.at("mod_distance_km") == doctest::Approx(2.0));
  CHECK(rep.scalars.at("mod_vht_h") == doctest::Approx(300.0 / 3600.0));
  CHECK(rep.scalars.at("total_vkt_km") == rep.scalars.at("mod_distance_km"));

  // peak-entry traversal feeds the peak figure
  log.traversals.push_back({0, 0, 28800.0, 28950.0});  // 08:00, 1.5x
  rep = compute_metrics(net, log, cfg, 1);
  CHECK(rep.scalars.at("tti_weighted_peak") == doctest::Approx(1.5));
}

TEST_CASE("utilization samples busy spans on a minute grid") {
  Network net = line_network(3);
  StrategyConfig cfg;
  cfg.am_peak_start = 0;  // shrink the AM window to 10 samples
  cfg.am_peak_end = 600;
  RunLog log;
  log.events.push_back({0.0, 0, EventType::Depart, -1, 1});
  log.events.push_back({300.0, 0, EventType::Park, -1, 2});
  MetricsReport rep = compute_metrics(net, log, cfg, 1);
  // busy at t = 0,60,...,240: 5 of 10 samples
  CHECK(rep.scalars.at("utilization_am") == doctest::Approx(0.5));

  // second vehicle busy the whole window pushes the fleet mean to 0.75
  log.events.insert(log.events.begin(), {0.0, 1, EventType::Depart, -1, 1});
  rep = compute_metrics(net, log, cfg, 2);
  CHECK(rep.scalars.at("utilization_am") == doctest::Approx(0.75));
}

TEST_CASE("status and fulfilment series") {
  Network net = line_network(3);
  StrategyConfig cfg;
  RunLog log;
  // vehicle 0 departs 600, picks up at 900, drops at 1500, parks 1800
  log.events.push_back({600.0, 0, EventType::Depart, -1, 1});
  log.events.push_back({900.0, 0, EventType::Pickup, 1, 2});
  log.events.push_back({1500.0, 0, EventType::Dropoff, 1, 3});
  log.events.push_back({1800.0, 0, EventType::Park, -1, 3});
  log.requests.push_back(done_request(1, RequestKind::PassengerSingle, 550, 900, 1500));

  MetricsReport rep = compute_metrics(net, log, cfg, 1);
  REQUIRE(rep.status_series.size() == 288);  // 5-minute grid
  const StatusSample& at0 = rep.status_series[0];      // t=0: parked
  const StatusSample& at600 = rep.status_series[2];    // t=600: cruising to pickup
  const StatusSample& at1200 = rep.status_series[4];   // t=1200: serving
  CHECK(at0.idle == 1);
  CHECK(at600.cruising == 1);
  CHECK(at1200.serving == 1);

  REQUIRE(rep.fulfilment_series.size() == 288);
  const FulfilmentSample& last = rep.fulfilment_series.back();
  CHECK(last.served_passenger == 1);
  CHECK(last.pending_passenger == 0);
  // at t=300 the request is requested but not yet assigned
  CHECK(rep.fulfilment_series[1].pending_passenger == 0);  // t=300 < request 550
  bool was_pending = false;
  for (const FulfilmentSample& f : rep.fulfilment_series) was_pending |= f.pending_passenger > 0;
  CHECK(!was_pending);  // assigned the moment it was requested (t_assigned = request_time)
}

TEST_CASE("average_reports") {
  MetricsReport a, b, c;
  a.scalars = {{"x", 1.0}, {"y", 10.0}};
  b.scalars = {{"x", 3.0}, {"y", 20.0}};
  c.scalars = {{"x", 5.0}, {"z", 7.0}};  // z only here: averaged over one report
  auto avg = average_reports({{1, a}, {2, b}, {3, c}});
  CHECK(avg.scalars.at("x") == doctest::Approx(3.0));
  CHECK(avg.scalars.at("y") == doctest::Approx(15.0));
  CHECK(avg.scalars.at("z") == doctest::Approx(7.0));

  auto avg2 = average_reports({{3, c}, {1, a}, {2, b}});
  CHECK(avg2.scalars == avg.scalars);
}

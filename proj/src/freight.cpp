#include "hitchsim/freight.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "hitchsim/csv.hpp"

namespace hitchsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<Depot> load_depots(const std::string& file, const Network& net) {
  std::vector<Depot> out;
  CsvReader r(file);
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() == 4 && f[0] == "id") continue;
    if (f.size() != 4) r.fail("expected id,node,vehicles,capacity");
    Depot d{static_cast<int>(r.integer(f[0])), static_cast<int>(r.integer(f[1])),
            static_cast<int>(r.integer(f[2])), static_cast<int>(r.integer(f[3]))};
    if (d.vehicle_count <= 0 || d.vehicle_capacity <= 0) r.fail("counts must be positive");
    if (!net.has_node(d.node)) r.fail("unknown node id");
    out.push_back(d);
  }
  if (out.empty()) throw std::runtime_error(file + ": no depots");
  return out;
}

std::vector<CarrierTour> build_tours(const std::vector<Request>& parcels,
                                     const std::vector<Depot>& depots, const Network& net,
                                     const TravelTimeField& field,
                                     std::vector<int>* unroutable_out) {
  TravelTimeField freeflow(net, field.bin_width());

  // nearest depot by free-flow time depot->delivery stop
  std::vector<std::vector<const Request*>> by_depot(depots.size());
  for (const Request& p : parcels) {
    double best = kInf;
    int best_d = -1;
    for (size_t di = 0; di < depots.size(); ++di) {
      auto r = shortest_path(net, freeflow, depots[di].node, p.dest, 0.0);
      if (!r) continue;
      auto back = shortest_path(net, freeflow, p.dest, depots[di].node, 0.0);
      if (!back) continue;
      if (r->total_time < best) {
        best = r->total_time;
        best_d = static_cast<int>(di);
      }
    }
    if (best_d < 0) {
      if (unroutable_out) unroutable_out->push_back(p.id);
      continue;
    }
    by_depot[best_d].push_back(&p);
  }

  std::vector<CarrierTour> tours;
  for (size_t di = 0; di < depots.size(); ++di) {
    const Depot& depot = depots[di];
    auto& list = by_depot[di];
    std::stable_sort(list.begin(), list.end(), [](const Request* a, const Request* b) {
      return std::tie(a->request_time, a->id) < std::tie(b->request_time, b->id);
    });
    for (size_t start = 0; start < list.size(); start += depot.vehicle_capacity) {
      size_t end = std::min(list.size(), start + depot.vehicle_capacity);
      std::vector<const Request*> batch(list.begin() + start, list.begin() + end);

      CarrierTour tour;
      tour.depot_id = depot.id;
      tour.start_time = batch.front()->request_time;

      double t = tour.start_time;
      int at = depot.node;
      std::vector<bool> done(batch.size(), false);
      for (size_t k = 0; k < batch.size(); ++k) {
        // nearest neighbor on current-time travel times, ties by parcel id
        double best = kInf;
        int pick = -1;
        for (size_t j = 0; j < batch.size(); ++j) {
          if (done[j]) continue;
          auto r = shortest_path(net, field, at, batch[j]->dest, t);
          if (!r) continue;
          if (r->total_time < best ||
              (r->total_time == best && pick >= 0 && batch[j]->id < batch[pick]->id)) {
            best = r->total_time;
            pick = static_cast<int>(j);
          }
        }
        if (pick < 0) break;  // remainder unreachable from here
        auto r = shortest_path(net, field, at, batch[pick]->dest, t);
        tour.legs.push_back({at, batch[pick]->dest, r->total_time, r->total_distance});
        tour.parcel_ids.push_back(batch[pick]->id);
        t += r->total_time;
        at = batch[pick]->dest;
        done[pick] = true;
      }
      if (auto back = shortest_path(net, field, at, depot.node, t))
        tour.legs.push_back({at, depot.node, back->total_time, back->total_distance});
      for (const TourLeg& leg : tour.legs) {
        tour.total_time += leg.time_s;
        tour.total_distance += leg.distance_m;
      }
      tours.push_back(std::move(tour));
    }
  }
  return tours;
}

CarrierMetrics carrier_metrics(const std::vector<CarrierTour>& tours) {
  CarrierMetrics m;
  for (const CarrierTour& t : tours) {
    m.driving_time_h += t.total_time / 3600.0;
    m.vkt_km += t.total_distance / 1000.0;
    ++m.trip_count;
  }
  return m;
}

std::vector<Request> offload(const std::vector<Request>& parcels,
                             const std::vector<int>& mod_served_ids) {
  std::unordered_set<int> served(mod_served_ids.begin(), mod_served_ids.end());
  std::vector<Request> remaining;
  for (const Request& p : parcels)
    if (!served.count(p.id)) remaining.push_back(p);
  return remaining;
}

void write_tours_csv(const std::string& file, const std::vector<CarrierTour>& tours) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "tour_id,depot,stop_seq,parcel_id,eta\n";
  char buf[128];
  for (size_t ti = 0; ti < tours.size(); ++ti) {
    const CarrierTour& tour = tours[ti];
    double t = tour.start_time;
    for (size_t s = 0; s < tour.parcel_ids.size(); ++s) {
      t += tour.legs[s].time_s;
      std::snprintf(buf, sizeof buf, "%zu,%d,%zu,%d,%.17g\n", ti, tour.depot_id, s,
                    tour.parcel_ids[s], t);
      out << buf;
    }
  }
}

}  // namespace hitchsim

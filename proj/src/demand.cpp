#include "hitchsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hitchsim/csv.hpp"
#include "hitchsim/rng.hpp"

namespace hitchsim {

const char* to_string(RequestKind k) {
  switch (k) {
    case RequestKind::PassengerSingle: return "SINGLE";
    case RequestKind::PassengerShared: return "SHARED";
    case RequestKind::Parcel: return "PARCEL";
  }
  return "?";
}

const char* to_string(RequestState s) {
  switch (s) {
    case RequestState::Pending: return "PENDING";
    case RequestState::Assigned: return "ASSIGNED";
    case RequestState::Onboard: return "ONBOARD";
    case RequestState::Completed: return "COMPLETED";
    case RequestState::Failed: return "FAILED";
  }
  return "?";
}

RequestKind request_kind_from_string(const std::string& s) {
  if (s == "SINGLE") return RequestKind::PassengerSingle;
  if (s == "SHARED") return RequestKind::PassengerShared;
  if (s == "PARCEL") return RequestKind::Parcel;
  throw std::runtime_error("unknown request kind '" + s + "'");
}

void DemandProfile::validate() const {
  double sum = 0;
  for (double w : hourly_weights) {
    if (w < 0 || !std::isfinite(w)) throw std::runtime_error("profile weight negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::runtime_error("profile weights must sum to 1");
  if (total_count < 0) throw std::runtime_error("negative total_count");
  if (shared_fraction < 0 || shared_fraction > 1)
    throw std::runtime_error("shared_fraction outside [0,1]");
}

DemandProfile DemandProfile::load(const std::string& profile_csv, int total_count,
                                  double shared_fraction) {
  DemandProfile p;
  p.total_count = total_count;
  p.shared_fraction = shared_fraction;
  CsvReader r(profile_csv);
  std::vector<std::string> f;
  std::array<bool, 24> seen{};
  while (r.next(f)) {
    if (f.size() != 2) r.fail("expected hour,weight");
    long long h = r.integer(f[0]);
    if (h < 0 || h > 23) r.fail("hour outside 0..23");
    if (seen[h]) r.fail("duplicate hour");
    seen[h] = true;
    p.hourly_weights[h] = r.num(f[1]);
  }
  // normalize so hand-edited profiles need not sum exactly to 1
  double sum = 0;
  for (double w : p.hourly_weights) sum += w;
  if (sum <= 0) throw std::runtime_error(profile_csv + ": weights sum to zero");
  for (double& w : p.hourly_weights) w /= sum;
  p.validate();
  return p;
}

SpatialWeights SpatialWeights::load(const std::string& file, const Network& net) {
  SpatialWeights sw;
  sw.node_weight.assign(net.nodes().size(), 0.0);
  CsvReader r(file);
  std::vector<std::string> f;
  double sum = 0;
  while (r.next(f)) {
    if (f.size() != 2) r.fail("expected node,weight");
    int idx = net.node_index(static_cast<int>(r.integer(f[0])));
    double w = r.num(f[1]);
    if (w < 0) r.fail("negative weight");
    sw.node_weight[idx] = w;
    sum += w;
  }
  if (sum <= 0) throw std::runtime_error(file + ": weights sum to zero");
  for (double& w : sw.node_weight) w /= sum;
  return sw;
}

namespace {

int sample_index(std::mt19937_64& g, const std::vector<double>& cumulative) {
  double u = uniform01(g) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

std::vector<Request> generate(const DemandProfile& profile, const Network& net,
                              std::uint64_t seed, int id_start, bool parcels,
                              const SpatialWeights* spatial) {
  profile.validate();
  if (net.nodes().size() < 2) throw std::runtime_error("need at least 2 nodes");
  std::mt19937_64 g(seed);
  std::vector<double> hour_cum(24);
  double acc = 0;
  for (int h = 0; h < 24; ++h) hour_cum[h] = (acc += profile.hourly_weights[h]);

  std::vector<double> node_cum;
  if (spatial) {
    node_cum.resize(spatial->node_weight.size());
    acc = 0;
    for (size_t i = 0; i < node_cum.size(); ++i) node_cum[i] = (acc += spatial->node_weight[i]);
  }
  auto pick_node = [&]() -> int {
    if (spatial) return sample_index(g, node_cum);
    return static_cast<int>(bounded(g, net.nodes().size()));
  };

  std::vector<Request> out;
  out.reserve(profile.total_count);
  for (int i = 0; i < profile.total_count; ++i) {
    Request r;
    r.id = id_start + i;
    int hour = sample_index(g, hour_cum);
    r.request_time = hour * 3600.0 + uniform01(g) * 3600.0;
    int o = pick_node();
    int d = pick_node();
    while (d == o) d = pick_node();
    r.origin = net.nodes()[o].id;
    r.dest = net.nodes()[d].id;
    if (parcels) {
      r.kind = RequestKind::Parcel;
    } else {
      r.kind = uniform01(g) < profile.shared_fraction ? RequestKind::PassengerShared
                                                      : RequestKind::PassengerSingle;
    }
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const Request& a, const Request& b) {
    return a.request_time < b.request_time;
  });
  return out;
}

}  // namespace

std::vector<Request> generate_passenger_requests(const DemandProfile& profile,
                                                 const Network& net, std::uint64_t seed,
                                                 int id_start, const SpatialWeights* spatial) {
  return generate(profile, net, seed, id_start, false, spatial);
}

std::vector<Request> generate_parcel_requests(const DemandProfile& profile, const Network& net,
                                              std::uint64_t seed, int id_start,
                                              const SpatialWeights* spatial) {
  return generate(profile, net, seed, id_start, true, spatial);
}

std::vector<Request> load_requests(const std::string& file, const Network& net) {
  std::vector<Request> out;
  CsvReader r(file);
  std::vector<std::string> f;
  bool header_skipped = false;
  while (r.next(f)) {
    if (!header_skipped && f.size() == 5 && f[0] == "id") {
      header_skipped = true;
      continue;
    }
    header_skipped = true;
    if (f.size() != 5) r.fail("expected id,kind,origin,dest,request_time_s");
    Request q;
    q.id = static_cast<int>(r.integer(f[0]));
    q.kind = request_kind_from_string(f[1]);
    q.origin = static_cast<int>(r.integer(f[2]));
    q.dest = static_cast<int>(r.integer(f[3]));
    q.request_time = r.num(f[4]);
    if (!net.has_node(q.origin) || !net.has_node(q.dest)) r.fail("unknown node id");
    if (q.request_time < 0 || q.request_time >= kDaySeconds)
      r.fail("request_time outside [0,86400)");
    out.push_back(q);
  }
  std::stable_sort(out.begin(), out.end(), [](const Request& a, const Request& b) {
    return a.request_time < b.request_time;
  });
  return out;
}

void write_requests_csv(const std::string& file, const std::vector<Request>& reqs) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "id,kind,origin,dest,request_time_s\n";
  char buf[128];
  for (const Request& q : reqs) {
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%d,%.17g\n", q.id, to_string(q.kind), q.origin,
                  q.dest, q.request_time);
    out << buf;
  }
}

}  // namespace hitchsim

// Acceptance suite: one printed PASS/FAIL line per criterion. Exercises the
// built CLI on the desk fixture; expects FIXTURE_DIR, CLI_BIN and
// RECOMPUTE_SCRIPT in the environment (set by ctest).
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hitchsim/dispatch.hpp"
#include "hitchsim/network.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace hitchsim;

namespace {

// ---- pinned tolerances and thresholds ----
constexpr double kWaitCapS = 600.0;    // max passenger wait
constexpr double kWaitEpsS = 1e-6;     // slack on realized-wait comparisons
constexpr int kSeatCapacity = 4;       // desk fixture seats
constexpr double kRatioLo = 0.30;      // criterion 4 band
constexpr double kRatioHi = 0.70;
constexpr double kPaxLossMax = 0.05;   // criterion 5: at most 5% fewer served
constexpr double kTtiEps = 1e-9;       // criterion 8 free-flow check
constexpr double kDayBudgetS = 60.0;   // criterion 11
constexpr double kCompareBudgetS = 900.0;
constexpr double kAmStart = 25200, kAmEnd = 36000;  // desk peak windows
constexpr double kPmStart = 57600, kPmEnd = 75600;

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << "criterion " << criterion << " (" << name << "): " << (ok ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

std::string env_or_die(const char* key) {
  const char* v = std::getenv(key);
  if (!v || !*v) {
    std::cerr << "missing environment variable " << key << "\n";
    std::exit(2);
  }
  return v;
}

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// header-keyed CSV rows
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::string line;
  std::getline(in, line);
  auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line);
    std::map<std::string, std::string> row;
    for (size_t i = 0; i < header.size() && i < f.size(); ++i) row[header[i]] = f[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, double> load_scalars(const fs::path& metrics_json) {
  nlohmann::json j = nlohmann::json::parse(slurp(metrics_json));
  std::map<std::string, double> out;
  for (auto& [k, v] : j["scalars"].items()) out[k] = v.get<double>();
  return out;
}

bool in_peak(double t) {
  return (t >= kAmStart && t < kAmEnd) || (t >= kPmStart && t < kPmEnd);
}

// ------------------------------------------------------------------
// criterion 1: find_insertion vs exhaustive first-feasible enumeration
// ------------------------------------------------------------------

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Instance {
  StrategyConfig cfg;
  std::vector<Request> reqs;
  Vehicle v;
  Request incoming;
  double now;
};

double sp_time(const Network& net, const TravelTimeField& f, int o, int d, double t) {
  if (o == d) return 0.0;
  auto r = shortest_path(net, f, o, d, t);
  return r ? r->total_time : kInf;
}

bool oracle_feasible(const Network& net, const TravelTimeField& f, const Instance& in,
                     std::vector<ScheduleItem>& cand) {
  const double eps = 1e-9;
  double t = in.v.plan_time;
  int node = in.v.plan_node;
  for (ScheduleItem& it : cand) {
    if (it.node != node) {
      double dt = sp_time(net, f, node, it.node, t);
      if (dt == kInf) return false;
      t += dt;
    }
    t += in.cfg.dwell_s;
    it.planned_time = t;
    node = it.node;
  }
  int occ = static_cast<int>(in.v.onboard.size());
  for (const ScheduleItem& it : cand) {
    if (it.action == StopAction::Pickup && ++occ > in.v.seat_capacity) return false;
    if (it.action == StopAction::Dropoff) --occ;
  }
  auto req_of = [&](int id) -> const Request& {
    for (const Request& r : in.reqs)
      if (r.id == id) return r;
    return in.incoming;
  };
  auto pick_of = [&](int id) -> const ScheduleItem* {
    for (const ScheduleItem& it : cand)
      if (it.action == StopAction::Pickup && it.request_id == id) return &it;
    return nullptr;
  };
  for (const ScheduleItem& it : cand) {
    if (it.action != StopAction::Dropoff) continue;
    const Request& p = req_of(it.request_id);
    if (!p.is_passenger()) continue;
    double direct = sp_time(net, f, p.origin, p.dest, p.request_time);
    if (direct == kInf) return false;
    const ScheduleItem* pk = pick_of(p.id);
    double picked_at;
    if (pk) {
      if (pk->planned_time - p.request_time > in.cfg.max_passenger_wait_s + eps) return false;
      picked_at = pk->planned_time;
    } else {
      if (!p.t_pickup) return false;
      picked_at = *p.t_pickup;
    }
    if (it.planned_time - picked_at > in.cfg.detour_factor * direct + eps) return false;
  }
  if (in.cfg.strategy == Strategy::ShrRidl) {
    int pax = 0;
    for (int rid : in.v.onboard)
      if (req_of(rid).is_passenger()) ++pax;
    for (const ScheduleItem& it : cand) {
      const Request& r = req_of(it.request_id);
      if (!r.is_passenger()) {
        if (pax > 0) return false;
      } else {
        pax += it.action == StopAction::Pickup ? 1 : -1;
      }
    }
  }
  return true;
}

std::optional<std::vector<ScheduleItem>> oracle_insert(const Network& net,
                                                       const TravelTimeField& f,
                                                       const Instance& in) {
  const int n = static_cast<int>(in.v.schedule.size());
  ScheduleItem pick{StopAction::Pickup, in.incoming.id, in.incoming.origin, 0};
  ScheduleItem drop{StopAction::Dropoff, in.incoming.id, in.incoming.dest, 0};
  for (int i = in.v.locked; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      std::vector<ScheduleItem> cand;
      cand.insert(cand.end(), in.v.schedule.begin(), in.v.schedule.begin() + i);
      cand.push_back(pick);
      cand.insert(cand.end(), in.v.schedule.begin() + i, in.v.schedule.begin() + j);
      cand.push_back(drop);
      cand.insert(cand.end(), in.v.schedule.begin() + j, in.v.schedule.end());
      if (oracle_feasible(net, f, in, cand)) return cand;
    }
  return std::nullopt;
}

bool criterion1() {
  std::mt19937_64 g(20240817);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 6 + static_cast<int>(g() % 5);
    std::vector<Node> nodes;
    std::vector<Link> links;
    for (int i = 0; i < n; ++i) nodes.push_back({i + 1, i * 500.0, 0});
    int lid = 1;
    for (int i = 0; i < n; ++i)
      links.push_back({lid++, i + 1, (i + 1) % n + 1, 400.0 + static_cast<double>(g() % 1200),
                       10, 600, 0.15, 4});
    for (int k = 0; k < n / 2; ++k) {
      int a = static_cast<int>(g() % n), b = static_cast<int>(g() % n);
      if (a == b) continue;
      links.push_back({lid++, a + 1, b + 1, 400.0 + static_cast<double>(g() % 1200), 10, 600,
                       0.15, 4});
    }
    Network net = Network::build(nodes, links);
    TravelTimeField f(net);
    for (int l = 0; l < static_cast<int>(links.size()); ++l)
      for (int b = 0; b < f.num_bins(); ++b)
        if (g() % 3 == 0) f.set(l, b, f.at_bin(l, b) * (1.0 + (g() % 200) / 100.0));

    Instance in;
    in.cfg.strategy = static_cast<Strategy>(g() % 4);
    in.cfg.detour_factor = 1.3 + (g() % 5) * 0.2;
    in.cfg.seat_capacity = 2 + static_cast<int>(g() % 3);
    in.now = 30000.0 + static_cast<double>(g() % 20000);
    auto rnd_node = [&]() { return static_cast<int>(g() % n) + 1; };
    int next_id = 1;
    in.v.id = 0;
    in.v.seat_capacity = in.cfg.seat_capacity;
    in.v.current_node = rnd_node();
    in.v.plan_node = in.v.current_node;
    in.v.plan_time = in.now;
    in.v.idle_since = 0.0;

    int n_onboard = static_cast<int>(g() % 3);
    int n_assigned = static_cast<int>(g() % 3);  // schedule length <= 2 + 2*2 = 6
    for (int k = 0; k < n_onboard; ++k) {
      Request r;
      r.id = next_id++;
      r.kind = g() % 4 ? RequestKind::PassengerShared : RequestKind::Parcel;
      r.origin = rnd_node();
      r.dest = rnd_node();
      while (r.dest == r.origin) r.dest = rnd_node();
      r.request_time = in.now - 200.0 - (g() % 400);
      r.state = RequestState::Onboard;
      r.t_pickup = r.request_time + (g() % 200);
      r.assigned_vehicle = 0;
      in.v.onboard.push_back(r.id);
      in.v.schedule.push_back({StopAction::Dropoff, r.id, r.dest, 0});
      in.reqs.push_back(r);
    }
    for (int k = 0; k < n_assigned; ++k) {
      Request r;
      r.id = next_id++;
      r.kind = g() % 4 ? RequestKind::PassengerShared : RequestKind::Parcel;
      r.origin = rnd_node();
      r.dest = rnd_node();
      while (r.dest == r.origin) r.dest = rnd_node();
      r.request_time = in.now - (g() % 300);
      r.state = RequestState::Assigned;
      r.t_assigned = r.request_time;
      r.assigned_vehicle = 0;
      size_t pi = g() % (in.v.schedule.size() + 1);
      in.v.schedule.insert(in.v.schedule.begin() + pi, {StopAction::Pickup, r.id, r.origin, 0});
      size_t di = pi + 1 + g() % (in.v.schedule.size() - pi);
      in.v.schedule.insert(in.v.schedule.begin() + di, {StopAction::Dropoff, r.id, r.dest, 0});
      in.reqs.push_back(r);
    }
    in.incoming.id = next_id++;
    in.incoming.kind = g() % 3 == 0 ? RequestKind::Parcel : RequestKind::PassengerShared;
    in.incoming.origin = rnd_node();
    in.incoming.dest = rnd_node();
    while (in.incoming.dest == in.incoming.origin) in.incoming.dest = rnd_node();
    in.incoming.request_time = in.now - (g() % 200);
    in.reqs.push_back(in.incoming);

    Router router(net, f);
    std::vector<Vehicle> fleet{in.v};
    Controller c(net, router, in.cfg, in.reqs, fleet, 1);
    auto got = c.find_insertion(fleet[0], in.reqs.back(), in.now);
    auto want = oracle_insert(net, f, in);

    bool same = static_cast<bool>(got) == static_cast<bool>(want);
    if (same && got) {
      same = got->size() == want->size();
      for (size_t k = 0; same && k < got->size(); ++k)
        same = (*got)[k].action == (*want)[k].action &&
               (*got)[k].request_id == (*want)[k].request_id &&
               (*got)[k].node == (*want)[k].node &&
               std::abs((*got)[k].planned_time - (*want)[k].planned_time) < 1e-6;
    }
    if (!same) ++mismatches;
  }
  report(1, "insertion oracle equivalence", mismatches == 0,
         std::to_string(mismatches) + " mismatches in 1000 instances");
  return mismatches == 0;
}

// ------------------------------------------------------------------
// desk-fixture artifact checks
// ------------------------------------------------------------------

struct SeedData {
  std::vector<std::map<std::string, std::string>> requests, decisions, events;
};

SeedData load_seed(const fs::path& dir) {
  return {read_csv(dir / "requests_final.csv"), read_csv(dir / "decisions.csv"),
          read_csv(dir / "events.csv")};
}

bool check_invariants(const SeedData& d, std::string& why) {
  // conservation per kind
  std::map<std::string, std::array<long, 4>> tally;
  std::map<std::string, std::string> kind_of;
  for (const auto& r : d.requests) {
    kind_of[r.at("id")] = r.at("kind");
    auto& t = tally[r.at("kind")];
    ++t[0];
    const std::string& st = r.at("state");
    if (st == "COMPLETED")
      ++t[1];
    else if (st == "FAILED")
      ++t[2];
    else
      ++t[3];
  }
  for (const auto& [k, t] : tally)
    if (t[0] != t[1] + t[2] + t[3]) {
      why = "conservation broken for " + k;
      return false;
    }
  if (tally["SINGLE"][0] + tally["SHARED"][0] != 5000 || tally["PARCEL"][0] != 600) {
    why = "unexpected request totals";
    return false;
  }

  // realized passenger wait within the cap, pickup precedes dropoff
  for (const auto& r : d.requests) {
    if (r.at("state") != "COMPLETED") continue;
    double tp = std::stod(r.at("t_pickup")), td = std::stod(r.at("t_dropoff"));
    double ta = std::stod(r.at("t_assigned")), t0 = std::stod(r.at("request_time_s"));
    if (tp >= td) {
      why = "pickup not before dropoff, request " + r.at("id");
      return false;
    }
    if (r.at("kind") != "PARCEL") {
      if (tp - t0 > kWaitCapS + kWaitEpsS) {
        why = "passenger wait " + std::to_string(tp - t0) + " s, request " + r.at("id");
        return false;
      }
      if (ta - t0 > kWaitCapS + kWaitEpsS) {
        why = "assignment delay beyond cap, request " + r.at("id");
        return false;
      }
    }
  }

  // event-stream occupancy never exceeds the seats
  std::map<std::string, int> onboard;
  std::map<std::string, bool> picked;
  for (const auto& e : d.events) {
    const std::string& type = e.at("event");
    if (type == "PICKUP") {
      if (picked[e.at("request_id")]) {
        why = "double pickup";
        return false;
      }
      picked[e.at("request_id")] = true;
      if (++onboard[e.at("vehicle_id")] > kSeatCapacity) {
        why = "occupancy above " + std::to_string(kSeatCapacity) + " on vehicle " +
              e.at("vehicle_id");
        return false;
      }
    } else if (type == "DROPOFF") {
      if (!picked[e.at("request_id")]) {
        why = "dropoff before pickup, request " + e.at("request_id");
        return false;
      }
      --onboard[e.at("vehicle_id")];
    }
  }
  return true;
}

bool check_shr_gate(const SeedData& d, std::string& why) {
  std::map<std::string, const std::map<std::string, std::string>*> req_by_id;
  for (const auto& r : d.requests) req_by_id[r.at("id")] = &r;
  for (const auto& dec : d.decisions) {
    const auto* req = req_by_id.at(dec.at("request_id"));
    if (req->at("kind") != "PARCEL") continue;
    double t = std::stod(dec.at("t"));
    const std::string& veh = dec.at("vehicle_id");
    bool has_pax = false;
    for (const auto& r : d.requests) {
      if (r.at("kind") == "PARCEL" || r.at("vehicle") != veh || r.at("t_assigned").empty())
        continue;
      double ta = std::stod(r.at("t_assigned"));
      double end = std::numeric_limits<double>::infinity();
      if (!r.at("t_dropoff").empty())
        end = std::stod(r.at("t_dropoff"));
      else if (!r.at("t_failed").empty())
        end = std::stod(r.at("t_failed"));
      if (ta <= t && t <= end) {
        has_pax = true;
        break;
      }
    }
    if (!has_pax) {
      why = "parcel " + dec.at("request_id") + " assigned to passenger-free vehicle " + veh +
            " at t=" + dec.at("t");
      return false;
    }
  }
  return true;
}

bool check_ridl_gate(const SeedData& d, std::string& why) {
  std::map<std::string, std::string> kind_of;
  for (const auto& r : d.requests) kind_of[r.at("id")] = r.at("kind");
  for (const auto& dec : d.decisions) {
    if (dec.at("mechanism") == "IDLE_DISPATCH" && in_peak(std::stod(dec.at("t")))) {
      why = "idle dispatch at peak t=" + dec.at("t");
      return false;
    }
  }
  std::map<std::string, int> pax_onboard;
  for (const auto& e : d.events) {
    const std::string& type = e.at("event");
    if (type != "PICKUP" && type != "DROPOFF") continue;
    const std::string& veh = e.at("vehicle_id");
    bool parcel = kind_of.at(e.at("request_id")) == "PARCEL";
    if (parcel) {
      if (pax_onboard[veh] > 0) {
        why = "parcel stop with passenger onboard, vehicle " + veh + " t=" + e.at("t");
        return false;
      }
    } else {
      pax_onboard[veh] += type == "PICKUP" ? 1 : -1;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::string fixture_dir = env_or_die("FIXTURE_DIR");
  const std::string cli = env_or_die("CLI_BIN");
  const std::string recompute = env_or_die("RECOMPUTE_SCRIPT");

  fs::path work = fs::temp_directory_path() / "hitchsim_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  fs::path log = work / "cli.log";

  // desk.conf references fixture files relative to the repo root; rewrite to
  // absolute paths so the suite can run from any working directory
  fs::path fixtures(fixture_dir);
  auto abs_config = [&](const std::string& name, bool keep_background,
                        const std::string& strategy) {
    std::ifstream in(fixtures / "desk.conf");
    fs::path out_path = work / name;
    std::ofstream out(out_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!keep_background && line.rfind("background=", 0) == 0) continue;
      if (!strategy.empty() && line.rfind("strategy=", 0) == 0) {
        out << "strategy=" << strategy << "\n";
        continue;
      }
      auto pos = line.find("=fixtures/");
      if (pos != std::string::npos)
        line = line.substr(0, pos + 1) + (fixtures / line.substr(pos + 10)).string();
      out << line << "\n";
    }
    return out_path.string();
  };
  std::string desk = abs_config("desk.conf", true, "");
  std::string desk_idl = abs_config("desk_idl.conf", true, "SHR_IDL");
  std::string desk_freeflow = abs_config("desk_freeflow.conf", false, "");

  auto cli_call = [&](const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " >> \"" + log.string() + "\" 2>&1";
    return run_cmd(cmd);
  };
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };

  criterion1();

  // full four-strategy comparison underlies criteria 2-8 and 10
  fs::path cmp = work / "compare";
  auto t0 = clock::now();
  int rc = run_cmd("\"" + cli + "\" compare --config \"" + desk + "\" --out \"" +
                   cmp.string() + "\" --force >> \"" + log.string() + "\" 2>&1");
  double compare_s = secs(t0, clock::now());
  if (rc != 0) {
    std::cerr << "compare run failed, see " << log << "\n";
    for (int c = 2; c <= 11; ++c) report(c, "skipped", false, "compare run failed");
    return 1;
  }

  const std::vector<std::string> strategies{"BASE", "SHR", "SHR_IDL", "SHR_RIDL"};
  const std::vector<int> seeds{1, 2, 3};
  std::map<std::string, std::map<std::string, double>> avg;
  for (const auto& s : strategies) avg[s] = load_scalars(cmp / s / "metrics.json");

  {  // criterion 2
    bool ok = true;
    std::string why;
    for (const auto& s : strategies)
      for (int seed : seeds) {
        SeedData d = load_seed(cmp / s / ("seed_" + std::to_string(seed)));
        if (!check_invariants(d, why)) {
          why = s + " seed " + std::to_string(seed) + ": " + why;
          ok = false;
          break;
        }
      }
    report(2, "feasibility invariants", ok, why);
  }

  {  // criterion 3
    bool ok = true;
    std::string why;
    for (int seed : seeds) {
      SeedData shr = load_seed(cmp / "SHR" / ("seed_" + std::to_string(seed)));
      if (!check_shr_gate(shr, why)) {
        why = "SHR seed " + std::to_string(seed) + ": " + why;
        ok = false;
        break;
      }
      SeedData ridl = load_seed(cmp / "SHR_RIDL" / ("seed_" + std::to_string(seed)));
      if (!check_ridl_gate(ridl, why)) {
        why = "SHR_RIDL seed " + std::to_string(seed) + ": " + why;
        ok = false;
        break;
      }
    }
    report(3, "strategy gates", ok, why);
  }

  {  // criterion 4
    double ratio = avg["SHR"]["served_parcel"] / avg["SHR_IDL"]["served_parcel"];
    char buf[128];
    std::snprintf(buf, sizeof buf, "SHR/SHR_IDL parcel ratio %.3f (band %.2f..%.2f)", ratio,
                  kRatioLo, kRatioHi);
    report(4, "parcel-served ratio", ratio >= kRatioLo && ratio <= kRatioHi, buf);
  }

  {  // criterion 5
    double base = avg["BASE"]["served_passenger"];
    bool ok = true;
    std::string detail;
    for (const auto& s : {"SHR", "SHR_IDL", "SHR_RIDL"}) {
      double v = avg[s]["served_passenger"];
      double delta = (v - base) / base;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s %+0.2f%% ", s, 100 * delta);
      detail += buf;
      ok = ok && v < base && -delta <= kPaxLossMax;
    }
    report(5, "passenger served decrease <= 5%", ok, detail);
  }

  {  // criterion 6
    bool ok = true;
    std::string detail;
    for (const auto& s : {"SHR", "SHR_IDL", "SHR_RIDL"}) {
      double v = avg[s]["carrier_driving_h"], b = avg[s]["carrier_baseline_driving_h"];
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s %.2f/%.2f h ", s, v, b);
      detail += buf;
      ok = ok && v < b;
    }
    ok = ok && avg["SHR_IDL"]["carrier_driving_h"] <= avg["SHR"]["carrier_driving_h"];
    report(6, "carrier driving time decreases", ok, detail);
  }

  {  // criterion 7
    double bm = avg["BASE"]["utilization_midday"], bp = avg["BASE"]["utilization_peak"];
    bool ok = true;
    std::string detail;
    for (const auto& s : {"SHR_IDL", "SHR_RIDL"}) {
      double dm = (avg[s]["utilization_midday"] - bm) / bm;
      double dp = (avg[s]["utilization_peak"] - bp) / bp;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s midday %+0.1f%% peak %+0.1f%% ", s, 100 * dm,
                    100 * dp);
      detail += buf;
      ok = ok && avg[s]["utilization_midday"] > bm && std::abs(dp) < std::abs(dm);
    }
    report(7, "midday utilization gain dominates", ok, detail);
  }

  {  // criterion 8
    fs::path ffout = work / "freeflow";
    bool ok = cli_call("simulate --config \"" + desk_freeflow + "\" --out \"" +
                       ffout.string() + "\" --seed-list 1 --iterations 1 --force") == 0;
    double tti_d = 0, tti_p = 0;
    if (ok) {
      auto ff = load_scalars(ffout / "metrics.json");
      tti_d = ff["tti_weighted_daily"];
      tti_p = ff["tti_weighted_peak"];
      ok = std::abs(tti_d - 1.0) <= kTtiEps && std::abs(tti_p - 1.0) <= kTtiEps;
    }
    double peak = avg["BASE"]["tti_weighted_peak"], daily = avg["BASE"]["tti_weighted_daily"];
    ok = ok && peak >= daily && daily > 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "free-flow %.12f/%.12f, fixture daily %.2f peak %.2f",
                  tti_d, tti_p, daily, peak);
    report(8, "TTI properties", ok, buf);
  }

  {  // criterion 9
    fs::path r1 = work / "det_a", r2 = work / "det_b";
    bool ok = cli_call("simulate --config \"" + desk_idl + "\" --out \"" + r1.string() +
                       "\" --seed-list 1,2,3 --force") == 0 &&
              cli_call("simulate --config \"" + desk_idl + "\" --out \"" + r2.string() +
                       "\" --seed-list 3,2,1 --force") == 0;
    std::string why;
    if (ok) {
      for (const char* f : {"seed_1/events.csv", "seed_1/metrics.json", "seed_3/events.csv",
                            "metrics.json", "manifest.json"}) {
        if (slurp(r1 / f) != slurp(r2 / f)) {
          ok = false;
          why = std::string(f) + " differs between reruns";
          break;
        }
      }
      if (ok && slurp(r1 / "seed_1" / "events.csv").empty()) {
        ok = false;
        why = "empty event log";
      }
    }
    report(9, "determinism and seed-order independence", ok, why);
  }

  {  // criterion 10
    std::string dirs;
    for (const auto& s : strategies)
      for (int seed : seeds)
        dirs += " \"" + (cmp / s / ("seed_" + std::to_string(seed))).string() + "\"";
    int rrc = run_cmd("python3 \"" + recompute + "\"" + dirs + " >> \"" + log.string() +
                      "\" 2>&1");
    report(10, "independent metric recomputation", rrc == 0,
           rrc == 0 ? "12 seed dirs" : "script reported mismatches, see cli.log");
  }

  {  // criterion 11
    fs::path day = work / "one_day";
    auto s0 = clock::now();
    bool ok = cli_call("simulate --config \"" + desk_idl + "\" --out \"" + day.string() +
                       "\" --seed-list 2 --iterations 1 --force") == 0;
    double day_s = secs(s0, clock::now());
    ok = ok && day_s < kDayBudgetS && compare_s < kCompareBudgetS;
    char buf[128];
    std::snprintf(buf, sizeof buf, "single day %.1f s (budget %.0f), compare %.1f s (budget %.0f)",
                  day_s, kDayBudgetS, compare_s, kCompareBudgetS);
    report(11, "performance", ok, buf);
  }

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT") << std::endl;
  return g_failures == 0 ? 0 : 1;
}

#include "hitchsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include "hitchsim/csv.hpp"

namespace hitchsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Network Network::build(std::vector<Node> nodes, std::vector<Link> links) {
  Network net;
  net.nodes_ = std::move(nodes);
  net.links_ = std::move(links);
  for (size_t i = 0; i < net.nodes_.size(); ++i) {
    const Node& n = net.nodes_[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      throw std::runtime_error("node " + std::to_string(n.id) + ": non-finite coordinates");
    if (!net.node_idx_.emplace(n.id, static_cast<int>(i)).second)
      throw std::runtime_error("duplicate node id " + std::to_string(n.id));
  }
  net.out_.resize(net.nodes_.size());
  for (size_t i = 0; i < net.links_.size(); ++i) {
    const Link& l = net.links_[i];
    if (!net.link_idx_.emplace(l.id, static_cast<int>(i)).second)
      throw std::runtime_error("duplicate link id " + std::to_string(l.id));
    if (l.length_m <= 0 || l.ffs_mps <= 0 || l.cap_vph <= 0)
      throw std::runtime_error("link " + std::to_string(l.id) +
                               ": length, speed and capacity must be positive");
    if (l.from == l.to)
      throw std::runtime_error("link " + std::to_string(l.id) + ": self loop");
    auto fi = net.node_idx_.find(l.from);
    auto ti = net.node_idx_.find(l.to);
    if (fi == net.node_idx_.end() || ti == net.node_idx_.end())
      throw std::runtime_error("link " + std::to_string(l.id) + ": unknown endpoint node");
    net.out_[fi->second].push_back(static_cast<int>(i));
    net.from_idx_.push_back(fi->second);
    net.to_idx_.push_back(ti->second);
  }
  for (auto& v : net.out_)
    std::sort(v.begin(), v.end(),
              [&](int a, int b) { return net.links_[a].id < net.links_[b].id; });
  return net;
}

Network Network::load(const std::string& node_file, const std::string& link_file) {
  std::vector<Node> nodes;
  {
    CsvReader r(node_file);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 3) r.fail("expected id,x,y");
      nodes.push_back({static_cast<int>(r.integer(f[0])), r.num(f[1]), r.num(f[2])});
    }
  }
  std::vector<Link> links;
  {
    CsvReader r(link_file);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 8) r.fail("expected id,from,to,length_m,ffs_mps,cap_vph,alpha,beta");
      links.push_back({static_cast<int>(r.integer(f[0])), static_cast<int>(r.integer(f[1])),
                       static_cast<int>(r.integer(f[2])), r.num(f[3]), r.num(f[4]),
                       r.num(f[5]), r.num(f[6]), r.num(f[7])});
    }
  }
  return build(std::move(nodes), std::move(links));
}

int Network::node_index(int id) const {
  auto it = node_idx_.find(id);
  if (it == node_idx_.end())
    throw std::runtime_error("unknown node id " + std::to_string(id));
  return it->second;
}

int Network::link_index(int id) const {
  auto it = link_idx_.find(id);
  if (it == link_idx_.end())
    throw std::runtime_error("unknown link id " + std::to_string(id));
  return it->second;
}

TravelTimeField::TravelTimeField(const Network& net, double bin_width)
    : bin_width_(bin_width), num_bins_(static_cast<int>(kDaySeconds / bin_width)) {
  if (num_bins_ <= 0 || bin_width_ * num_bins_ != kDaySeconds)
    throw std::runtime_error("bin width must divide 86400");
  tt_.reserve(net.links().size());
  for (const Link& l : net.links())
    tt_.emplace_back(num_bins_, l.free_flow_time());
}

void TravelTimeField::dump_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "link_idx,bin,seconds\n";
  char buf[64];
  for (size_t l = 0; l < tt_.size(); ++l)
    for (int b = 0; b < num_bins_; ++b) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", l, b, tt_[l][b]);
      out << buf;
    }
}

double link_travel_time(const Link& link, double volume_vph) {
  if (volume_vph < 0) throw std::runtime_error("negative volume");
  return link.free_flow_time() *
         (1.0 + link.alpha * std::pow(volume_vph / link.cap_vph, link.beta));
}

TravelTimeField within_day_update(const Network& net, const TravelTimeField& old_field,
                                  const VolumeGrid& volumes, int iteration_k) {
  if (iteration_k < 1) throw std::runtime_error("iteration_k must be >= 1");
  TravelTimeField out = old_field;
  const double w = 1.0 / iteration_k;
  for (size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    const double fft = link.free_flow_time();
    for (int b = 0; b < out.num_bins(); ++b) {
      double fresh = link_travel_time(link, volumes.vph(static_cast<int>(l), b));
      double v = (1.0 - w) * old_field.at_bin(static_cast<int>(l), b) + w * fresh;
      out.set(static_cast<int>(l), b, std::max(v, fft));
    }
  }
  return out;
}

VolumeGrid load_background(const std::string& file, const Network& net, double bin_width) {
  VolumeGrid grid(static_cast<int>(net.links().size()), bin_width);
  grid.background_vph.assign(net.links().size(),
                             std::vector<double>(grid.num_bins(), 0.0));
  CsvReader r(file);
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 3) r.fail("expected link_id,bin,volume_vph");
    int li = net.link_index(static_cast<int>(r.integer(f[0])));
    long long bin = r.integer(f[1]);
    double vph = r.num(f[2]);
    if (vph < 0) r.fail("negative volume");
    if (bin == -1) {
      for (double& v : grid.background_vph[li]) v = vph;
    } else if (bin >= 0 && bin < grid.num_bins()) {
      grid.background_vph[li][bin] = vph;
    } else {
      r.fail("bin out of range");
    }
  }
  return grid;
}

double field_relative_change(const TravelTimeField& a, const TravelTimeField& b) {
  if (a.num_links() != b.num_links() || a.num_bins() != b.num_bins())
    throw std::runtime_error("field shape mismatch");
  double sum = 0;
  long n = 0;
  for (int l = 0; l < a.num_links(); ++l)
    for (int bin = 0; bin < a.num_bins(); ++bin) {
      double x = a.at_bin(l, bin), y = b.at_bin(l, bin);
      sum += std::abs(y - x) / x;
      ++n;
    }
  return n ? sum / n : 0.0;
}

std::vector<std::vector<double>> all_pairs_free_flow(const Network& net) {
  const size_t n = net.nodes().size();
  std::vector<std::vector<double>> out(n);
  for (size_t o = 0; o < n; ++o) {
    std::vector<double>& dist = out[o];
    dist.assign(n, kInf);
    dist[o] = 0;
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    pq.push({0, static_cast<int>(o)});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int li : net.out_links(u)) {
        const Link& l = net.links()[li];
        int v = net.link_to_idx(li);
        double nd = d + l.free_flow_time();
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      }
    }
  }
  return out;
}

namespace {

// Label-correcting relaxation; handles non-FIFO fields, ties by link id.
struct SearchResult {
  std::vector<double> arrival;
  std::vector<int> pred_link;
};

SearchResult td_search(const Network& net, const TravelTimeField& field, int origin_idx,
                       double depart_time) {
  const size_t n = net.nodes().size();
  SearchResult res{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
  res.arrival[origin_idx] = depart_time;
  std::deque<int> queue{origin_idx};
  std::vector<char> queued(n, 0);
  queued[origin_idx] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    queued[u] = 0;
    const double tu = res.arrival[u];
    for (int li : net.out_links(u)) {
      const Link& l = net.links()[li];
      int v = net.link_to_idx(li);
      double ta = tu + field.at(li, tu);
      bool better = ta < res.arrival[v];
      bool tie = ta == res.arrival[v] && res.pred_link[v] >= 0 &&
                 l.id < net.links()[res.pred_link[v]].id;
      if (better || tie) {
        res.arrival[v] = ta;
        res.pred_link[v] = li;
        if (better && !queued[v]) {
          queue.push_back(v);
          queued[v] = 1;
        }
      }
    }
  }
  return res;
}

}  // namespace

std::optional<Route> shortest_path(const Network& net, const TravelTimeField& field,
                                   int origin_id, int dest_id, double depart_time) {
  int o = net.node_index(origin_id), d = net.node_index(dest_id);
  Route route;
  route.depart_time = depart_time;
  if (o == d) return route;
  SearchResult res = td_search(net, field, o, depart_time);
  if (res.arrival[d] == kInf) return std::nullopt;
  for (int v = d; v != o;) {
    int li = res.pred_link[v];
    route.links.push_back(li);
    route.total_distance += net.links()[li].length_m;
    v = net.node_index(net.links()[li].from);
  }
  std::reverse(route.links.begin(), route.links.end());
  route.total_time = res.arrival[d] - depart_time;
  return route;
}

const Router::Labels& Router::labels(int origin_idx, double depart_time) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof depart_time);
  std::memcpy(&bits, &depart_time, sizeof bits);
  Key key{origin_idx, bits};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (cache_.size() > 100000) cache_.clear();  // bound memory over a long day
  SearchResult res = td_search(*net_, *field_, origin_idx, depart_time);
  auto [pos, ok] = cache_.emplace(key, Labels{std::move(res.arrival), std::move(res.pred_link)});
  return pos->second;
}

double Router::travel_time(int origin_id, int dest_id, double depart_time) {
  int o = net_->node_index(origin_id), d = net_->node_index(dest_id);
  if (o == d) return 0;
  const Labels& lab = labels(o, depart_time);
  return lab.arrival[d] == kInf ? kInf : lab.arrival[d] - depart_time;
}

std::optional<Route> Router::route(int origin_id, int dest_id, double depart_time) {
  int o = net_->node_index(origin_id), d = net_->node_index(dest_id);
  Route r;
  r.depart_time = depart_time;
  if (o == d) return r;
  const Labels& lab = labels(o, depart_time);
  if (lab.arrival[d] == kInf) return std::nullopt;
  for (int v = d; v != o;) {
    int li = lab.pred_link[v];
    r.links.push_back(li);
    r.total_distance += net_->links()[li].length_m;
    v = net_->node_index(net_->links()[li].from);
  }
  std::reverse(r.links.begin(), r.links.end());
  r.total_time = lab.arrival[d] - depart_time;
  return r;
}

}  // namespace hitchsim

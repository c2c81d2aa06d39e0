#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hitchsim {

constexpr double kDaySeconds = 86400.0;

struct Node {
  int id;
  double x, y;  // planar meters
};

struct Link {
  int id;
  int from, to;      // node ids
  double length_m;
  double ffs_mps;    // free-flow speed
  double cap_vph;
  double alpha, beta;  // volume-delay parameters

  double free_flow_time() const { return length_m / ffs_mps; }
};

class Network {
public:
  static Network load(const std::string& node_file, const std::string& link_file);
  static Network build(std::vector<Node> nodes, std::vector<Link> links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }

  int node_index(int id) const;  // throws on unknown id
  int link_index(int id) const;
  bool has_node(int id) const { return node_idx_.count(id) != 0; }

  // Outgoing link indices for a node index, ascending link id.
  const std::vector<int>& out_links(int node_idx) const { return out_[node_idx]; }

  // Link endpoint node indices, precomputed for hot search loops.
  int link_from_idx(int link_idx) const { return from_idx_[link_idx]; }
  int link_to_idx(int link_idx) const { return to_idx_[link_idx]; }

private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::unordered_map<int, int> node_idx_, link_idx_;
  std::vector<std::vector<int>> out_;
  std::vector<int> from_idx_, to_idx_;
};

// Piecewise-constant per-link travel times over the day, one entry per bin.
class TravelTimeField {
public:
  TravelTimeField() = default;
  TravelTimeField(const Network& net, double bin_width = 900.0);  // free-flow init

  double bin_width() const { return bin_width_; }
  int num_bins() const { return num_bins_; }
  int num_links() const { return static_cast<int>(tt_.size()); }
  int bin_of(double t) const {
    int b = static_cast<int>(t / bin_width_);
    if (b < 0) b = 0;
    if (b >= num_bins_) b = num_bins_ - 1;  // past-midnight traffic uses last bin
    return b;
  }

  double at(int link_idx, double t) const { return tt_[link_idx][bin_of(t)]; }
  double at_bin(int link_idx, int bin) const { return tt_[link_idx][bin]; }
  void set(int link_idx, int bin, double seconds) { tt_[link_idx][bin] = seconds; }

  void dump_csv(const std::string& path) const;

private:
  double bin_width_ = 900.0;
  int num_bins_ = 0;
  std::vector<std::vector<double>> tt_;  // [link_idx][bin]
};

struct Route {
  std::vector<int> links;  // link indices, in traversal order
  double depart_time = 0;
  double total_time = 0;
  double total_distance = 0;
};

// Per-link, per-bin traversal counts plus optional static background flow (vph).
struct VolumeGrid {
  double bin_width = 900.0;
  std::vector<std::vector<double>> count;           // traversal entries per bin
  std::vector<std::vector<double>> background_vph;  // empty when unused

  VolumeGrid() = default;
  VolumeGrid(int n_links, double bw)
      : bin_width(bw),
        count(n_links, std::vector<double>(static_cast<int>(kDaySeconds / bw), 0.0)) {}

  int num_bins() const { return count.empty() ? 0 : static_cast<int>(count[0].size()); }
  double vph(int link_idx, int bin) const {
    double v = count[link_idx][bin] * 3600.0 / bin_width;
    if (!background_vph.empty()) v += background_vph[link_idx][bin];
    return v;
  }
};

// BPR-form volume delay.
double link_travel_time(const Link& link, double volume_vph);

// Static background flows, CSV `link_id,bin,volume_vph`; bin -1 fills all bins.
VolumeGrid load_background(const std::string& file, const Network& net, double bin_width);

// Method of successive averages over the previous field and the freshly
// computed volume-delay times; never drops below free flow.
TravelTimeField within_day_update(const Network& net, const TravelTimeField& old_field,
                                  const VolumeGrid& volumes, int iteration_k);

// Mean relative change between two fields, for the learning stop rule.
double field_relative_change(const TravelTimeField& a, const TravelTimeField& b);

// All-pairs free-flow travel times by node index; +inf where unreachable.
// Free flow lower-bounds every field, so these are admissible bounds for the
// dispatcher's insertion pruning.
std::vector<std::vector<double>> all_pairs_free_flow(const Network& net);

// Time-minimal route under the field, travel time frozen at each link's entry
// bin, label-correcting so non-FIFO fields are handled; ties broken by
// smallest link id. Empty optional when dest is unreachable.
std::optional<Route> shortest_path(const Network& net, const TravelTimeField& field,
                                   int origin_id, int dest_id, double depart_time);

// Dijkstra-to-all with memoisation keyed on (origin, depart time). Used by the
// dispatcher, which evaluates many candidate legs from the same anchor.
class Router {
public:
  Router(const Network& net, const TravelTimeField& field) : net_(&net), field_(&field) {}

  void set_field(const TravelTimeField& field) {
    field_ = &field;
    cache_.clear();
  }

  // Travel time origin->dest departing at t; +inf when unreachable.
  double travel_time(int origin_id, int dest_id, double depart_time);
  std::optional<Route> route(int origin_id, int dest_id, double depart_time);

private:
  struct Labels {
    std::vector<double> arrival;
    std::vector<int> pred_link;
  };
  struct Key {
    int origin;
    std::uint64_t time_bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = k.time_bits * 0x9e3779b97f4a7c15ULL;
      h ^= static_cast<std::uint64_t>(k.origin) + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  const Labels& labels(int origin_idx, double depart_time);

  const Network* net_;
  const TravelTimeField* field_;
  std::unordered_map<Key, Labels, KeyHash> cache_;
};

}  // namespace hitchsim

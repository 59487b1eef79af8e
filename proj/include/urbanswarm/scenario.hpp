#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbanswarm/common.hpp"

namespace urbanswarm {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct Crossroad {
  std::int64_t id = 0;
  Point pos;
  friend bool operator==(const Crossroad&, const Crossroad&) = default;
};

struct Road {
  std::int64_t id = 0;
  NodeIndex a = 0;
  NodeIndex b = 0;
  double length = 0.0;
  bool length_override = false;

  NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
  friend bool operator==(const Road&, const Road&) = default;
};

enum class BuildingKind { Home, Work, Amenity };

const char* to_string(BuildingKind k);
std::optional<BuildingKind> parse_building_kind(std::string_view s);

struct Building {
  std::int64_t id = 0;
  NodeIndex anchor = 0;
  BuildingKind kind = BuildingKind::Home;
  friend bool operator==(const Building&, const Building&) = default;
};

struct BinSite {
  std::int64_t id = 0;
  EdgeIndex road = 0;
  double offset = 0.0;  // meters from road endpoint a
  friend bool operator==(const BinSite&, const BinSite&) = default;
};

struct Deposit {
  std::int64_t id = 0;
  NodeIndex crossroad = 0;
  friend bool operator==(const Deposit&, const Deposit&) = default;
};

using DepositSet = std::vector<Deposit>;

/// Undirected road network. Crossroads and roads are stored sorted by id, so
/// a smaller index always means a smaller id.
class RoadGraph {
 public:
  RoadGraph() = default;
  RoadGraph(std::vector<Crossroad> crossroads, std::vector<Road> roads);

  std::span<const Crossroad> crossroads() const { return crossroads_; }
  std::span<const Road> roads() const { return roads_; }
  std::size_t node_count() const { return crossroads_.size(); }
  std::size_t edge_count() const { return roads_.size(); }
  const Crossroad& node(NodeIndex n) const { return crossroads_[n]; }
  const Road& edge(EdgeIndex e) const { return roads_[e]; }

  /// Incident edges of a node, ascending by edge id.
  std::span<const EdgeIndex> incident(NodeIndex n) const;

  std::optional<NodeIndex> find_node(std::int64_t id) const;
  std::optional<EdgeIndex> find_edge(std::int64_t id) const;

  /// Nodes not reachable from node 0. Empty for a connected graph.
  std::vector<NodeIndex> unreachable_nodes() const;

  /// Position of the point `offset` meters along edge e measured from e.a.
  Point point_on(EdgeIndex e, double offset) const;

  friend bool operator==(const RoadGraph& l, const RoadGraph& r) {
    return l.crossroads_ == r.crossroads_ && l.roads_ == r.roads_;
  }

 private:
  std::vector<Crossroad> crossroads_;
  std::vector<Road> roads_;
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<EdgeIndex> adj_;
};

/// Immutable world: road graph plus buildings, bin sites and optional
/// deposits. Always validated on construction.
struct Scenario {
  RoadGraph graph;
  std::vector<Building> buildings;
  std::vector<BinSite> bins;
  DepositSet deposits;  // may be empty; see place_deposits

  Point bin_position(std::size_t bin) const {
    return graph.point_on(bins[bin].road, bins[bin].offset);
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every scenario invariant, throwing ScenarioError naming the first
/// violation found.
void validate(const Scenario& s);

/// Builds a Scenario from raw records with arbitrary ids, sorting and
/// re-indexing them. Endpoints and anchors are given by id here.
struct RawScenario {
  struct RawRoad {
    std::int64_t id;
    std::int64_t a;
    std::int64_t b;
    std::optional<double> length;
  };
  struct RawBuilding {
    std::int64_t id;
    std::int64_t crossroad;
    BuildingKind kind;
  };
  struct RawBin {
    std::int64_t id;
    std::int64_t road;
    double offset;
  };
  struct RawDeposit {
    std::int64_t id;
    std::int64_t crossroad;
  };
  std::vector<Crossroad> crossroads;
  std::vector<RawRoad> roads;
  std::vector<RawBuilding> buildings;
  std::vector<RawBin> bins;
  std::vector<RawDeposit> deposits;
};

Scenario build_scenario(const RawScenario& raw);

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

Scenario generate_grid(int rows, int cols, double edge_len, int n_bins, int n_buildings,
                       std::uint64_t seed);

// --- deposit placement -------------------------------------------------------

struct KMeansResult {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignment;  // per bin
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's k-means over bin positions in the plane.
KMeansResult kmeans_bins(const Scenario& s, std::size_t k, std::uint64_t seed, int max_iters);

/// Snaps centroids to distinct crossroads: nearest first, later duplicates
/// move to their next-nearest unused crossroad.
DepositSet snap_to_crossroads(const RoadGraph& g, std::span<const Point> centroids);

DepositSet place_deposits(const Scenario& s, std::size_t k, std::uint64_t seed, int max_iters = 300);

// --- routing -----------------------------------------------------------------

struct RouteEntry {
  double distance = 0.0;
  EdgeIndex next_hop = kNone;       // kNone at a deposit
  std::size_t deposit = 0;          // index into the DepositSet
};

/// Nearest-deposit distance and next hop for every crossroad.
class RoutingTable {
 public:
  RoutingTable() = default;
  explicit RoutingTable(std::vector<RouteEntry> entries, std::vector<bool> is_deposit)
      : entries_(std::move(entries)), is_deposit_(std::move(is_deposit)) {}

  const RouteEntry& operator[](NodeIndex n) const { return entries_[n]; }
  std::size_t size() const { return entries_.size(); }
  bool is_deposit(NodeIndex n) const { return is_deposit_[n]; }

 private:
  std::vector<RouteEntry> entries_;
  std::vector<bool> is_deposit_;
};

RoutingTable build_routing(const Scenario& s, const DepositSet& deposits);

/// Next hop toward `target` from every crossroad (kNone at the target). Among
/// equally short continuations the smallest edge id wins.
std::vector<EdgeIndex> shortest_path_tree(const RoadGraph& g, NodeIndex target);

/// Shortest path between two crossroads as a sequence of edges. Empty when
/// from == to.
std::vector<EdgeIndex> shortest_path(const RoadGraph& g, NodeIndex from, NodeIndex to);

}  // namespace urbanswarm

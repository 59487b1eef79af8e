#pragma once

#include <array>
#include <optional>
#include <vector>

#include "urbanswarm/common.hpp"
#include "urbanswarm/scenario.hpp"
#include "urbanswarm/stigmergy.hpp"

namespace urbanswarm {

// --- trash bins --------------------------------------------------------------

/// Smart bin: loose waste is packed eagerly into transportable units of
/// `unit` liters while packing slots remain.
struct TrashBin {
  Volume capacity = Volume::from_liters(125.0);
  Volume unit = Volume::from_liters(12.0);
  Volume loose;
  std::int64_t packed_units = 0;

  std::int64_t slots() const { return capacity.ml / unit.ml; }
  Volume stored() const { return packed_units * unit + loose; }
  Volume remaining() const { return capacity - stored(); }
  bool accepts(Volume v) const { return remaining() >= v; }

  friend bool operator==(const TrashBin&, const TrashBin&) = default;
};

/// Adds waste and packs. Precondition: bin.accepts(v).
void bin_absorb(TrashBin& bin, Volume v);

/// True iff the remaining capacity cannot take one citizen drop.
bool bin_is_full(const TrashBin& bin, Volume drop);

// --- shared world view ---------------------------------------------------------

/// Where each bin sits relative to the roads: the stretch of every road from
/// which a pedestrian is within the drop radius of the bin, and the bins
/// mounted on each road.
class ProximityIndex {
 public:
  struct Reach {
    std::size_t bin;
    double lo;  // along the road, measured from endpoint a
    double hi;
  };
  struct Mount {
    std::size_t bin;
    double offset;
  };

  ProximityIndex() = default;
  ProximityIndex(const Scenario& s, double radius);

  const std::vector<Reach>& reach(EdgeIndex e) const { return reach_[e]; }
  const std::vector<Mount>& mounted(EdgeIndex e) const { return mounted_[e]; }

 private:
  std::vector<std::vector<Reach>> reach_;
  std::vector<std::vector<Mount>> mounted_;
};

/// Running waste accounts for one simulation.
struct WasteLedger {
  Volume generated;
  Volume delivered;
  Volume truck_collected;
  std::int64_t drops = 0;
  std::int64_t refused_drops = 0;  // steps a carrying citizen spent in reach of a full bin
  std::int64_t pickups = 0;
  std::int64_t deliveries = 0;
  std::int64_t bins_emptied = 0;

  friend bool operator==(const WasteLedger&, const WasteLedger&) = default;
};

struct AgentParams {
  Volume drop;  // waste per citizen parcel
  double citizen_speed = 80.0;   // m/min
  double robot_speed = 250.0;    // m/min
  double robot_range = 30000.0;  // m on a full battery
  double safety_factor = 1.1;
  bool avoid_backtrack = true;
};

/// Mutable state plus read-only geometry that agent ticks act on.
struct World {
  const Scenario& scenario;
  const RoutingTable* routing;  // null in truck mode
  const ProximityIndex& proximity;
  const PheromoneParams& pheromone;
  const AgentParams& params;
  std::vector<TrashBin>& bins;
  std::vector<CrossroadTag>& tags;
  WasteLedger& ledger;
};

/// Position on the road network: at a crossroad, or `along` meters into edge
/// `edge` travelling away from crossroad `from`.
struct Position {
  NodeIndex node = 0;  // current crossroad, or the one being left
  EdgeIndex edge = kNone;
  double along = 0.0;

  bool on_edge() const { return edge != kNone; }
  friend bool operator==(const Position&, const Position&) = default;
};

// --- citizens ------------------------------------------------------------------

struct Trip {
  double depart = 0.0;  // seconds since simulation start
  std::size_t building = 0;
  bool parcel = false;  // the citizen produces a waste parcel when setting off
  friend bool operator==(const Trip&, const Trip&) = default;
};

struct Citizen {
  std::size_t id = 0;
  std::vector<Trip> itinerary;
  std::size_t next_trip = 0;
  Volume carried;
  Position pos;
  std::vector<EdgeIndex> path;  // remaining edges of the active trip, in order
  std::size_t path_step = 0;
  bool travelling = false;

  friend bool operator==(const Citizen&, const Citizen&) = default;
};

/// Source of shortest paths for citizen trips.
class PathSource {
 public:
  virtual ~PathSource() = default;
  virtual std::vector<EdgeIndex> path(NodeIndex from, NodeIndex to) = 0;
};

/// Advances one citizen over (now - dt, now]: departs when a trip is due,
/// walks its shortest path and drops its parcel into the first bin within
/// reach that can take it.
void citizen_tick(Citizen& c, World& w, PathSource& paths, double now, double dt);

// --- robots ----------------------------------------------------------------------

enum class RobotState { Wander, Carry, Recharge };
const char* to_string(RobotState s);

struct Cargo {
  Volume volume;
  double waste_found = 0.0;  // liters seen in the source bin at pickup
  friend bool operator==(const Cargo&, const Cargo&) = default;
};

struct Robot {
  std::size_t id = 0;
  RobotState state = RobotState::Wander;
  Position pos;
  bool needs_decision = true;  // standing at pos.node without a chosen road
  std::optional<EdgeIndex> came_from;
  double range = 0.0;
  std::optional<Cargo> cargo;
  double last_max = 0.0;
  bool recharge_pending = false;
  double episode_start = 0.0;  // when the current Carry/Recharge began

  friend bool operator==(const Robot&, const Robot&) = default;
};

/// Advances one robot over (now - dt, now] seconds through its
/// Wander/Carry/Recharge state machine. Tag interactions are stamped with
/// `now`. Returns the length in seconds of a Carry/Recharge episode that ended
/// during the tick, if any.
std::optional<double> robot_tick(Robot& r, World& w, Rng& rng, double now, double dt);

// --- truck baseline ----------------------------------------------------------------

struct Truck {
  std::vector<std::size_t> route;  // bin indices, each exactly once
  double bins_per_hour = 240.0;
  double window_start = 7 * 3600.0;  // seconds of day
  double window_end = 12 * 3600.0;
  std::size_t next = 0;
  std::int64_t day = -1;
  std::vector<std::pair<std::size_t, double>> service_log;  // (bin, time), latest day

  double service_interval() const { return 3600.0 / bins_per_hour; }
  friend bool operator==(const Truck&, const Truck&) = default;
};

/// Nearest-neighbour bin tour starting from the lowest bin id.
std::vector<std::size_t> truck_route(const Scenario& s);

/// Empties every route bin whose service slot falls at or before `now`.
void truck_tick(Truck& t, World& w, double now);

}  // namespace urbanswarm

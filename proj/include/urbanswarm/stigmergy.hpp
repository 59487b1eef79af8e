#pragma once

#include <optional>
#include <vector>

#include "urbanswarm/common.hpp"
#include "urbanswarm/scenario.hpp"

namespace urbanswarm {

/// Pheromone dynamics parameters. The diffusion rate is always 1 - exploitation.
class PheromoneParams {
 public:
  PheromoneParams(double evaporation, double exploitation, double per_liter = 1.0);

  double evaporation() const { return evaporation_; }
  double exploitation() const { return exploitation_; }
  double diffusion() const { return diffusion_; }
  double per_liter() const { return per_liter_; }

 private:
  double evaporation_;
  double exploitation_;
  double diffusion_;
  double per_liter_;
};

/// RFID record at a crossroad: last-operation timestamp, one pheromone amount
/// per incident road, and the route toward the nearest deposit.
struct CrossroadTag {
  struct Trail {
    EdgeIndex edge;
    double amount;
    friend bool operator==(const Trail&, const Trail&) = default;
  };

  NodeIndex crossroad = 0;
  double ts = 0.0;  // minutes
  std::vector<Trail> trails;  // same order as RoadGraph::incident
  double deposit_distance = 0.0;
  EdgeIndex deposit_next_hop = kNone;

  /// Zero pheromone on every incident road, ts = 0.
  static CrossroadTag blank(const RoadGraph& g, NodeIndex n, const RouteEntry& route);

  double amount(EdgeIndex e) const;
  Trail* find(EdgeIndex e);

  friend bool operator==(const CrossroadTag&, const CrossroadTag&) = default;
};

struct ArrivalContext {
  EdgeIndex arrival_edge = kNone;
  double now = 0.0;  // minutes
  bool carrying = false;
  double waste_found = 0.0;  // liters in the source bin; used only when carrying
  double last_max = 0.0;     // strongest trail seen on the previous tag
};

/// One robot interaction with a tag: linear evaporation on every road (clamped
/// at zero), then diffusion and, when carrying, marking on the arrival road.
void update_tag(CrossroadTag& tag, const ArrivalContext& ctx, const PheromoneParams& params);

double max_pheromone(const CrossroadTag& tag);

/// Picks the next road for a wandering robot. With probability `exploitation`
/// the strongest trail is followed (random among ties) unless all candidates
/// carry the same amount; otherwise a uniformly random candidate. The road the
/// robot arrived by is excluded unless it is the only one or `avoid_backtrack`
/// is false.
EdgeIndex select_edge(const CrossroadTag& tag, std::optional<EdgeIndex> came_from, double exploitation, Rng& rng,
                      bool avoid_backtrack = true);

}  // namespace urbanswarm

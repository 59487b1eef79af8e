#include "urbanswarm/stigmergy.hpp"

#include <algorithm>
#include <string>

namespace urbanswarm {

PheromoneParams::PheromoneParams(double evaporation, double exploitation, double per_liter)
    : evaporation_(evaporation), exploitation_(exploitation), diffusion_(1.0 - exploitation), per_liter_(per_liter) {
  if (!(evaporation >= 0.0 && evaporation <= 1.0))
    throw ConfigError("evaporation rate E_r must satisfy 0 <= E_r <= 1 (got " + format_double(evaporation) + ")");
  if (!(exploitation > 0.0 && exploitation <= 1.0))
    throw ConfigError("exploitation rate X_r must satisfy 0 < X_r <= 1 (got " + format_double(exploitation) + ")");
  if (!(per_liter >= 0.0) || !std::isfinite(per_liter))
    throw ConfigError("pheromone per liter P_a must be a non-negative number (got " + format_double(per_liter) + ")");
}

CrossroadTag CrossroadTag::blank(const RoadGraph& g, NodeIndex n, const RouteEntry& route) {
  CrossroadTag t;
  t.crossroad = n;
  for (EdgeIndex e : g.incident(n)) t.trails.push_back({e, 0.0});
  t.deposit_distance = route.distance;
  t.deposit_next_hop = route.next_hop;
  return t;
}

double CrossroadTag::amount(EdgeIndex e) const {
  for (const auto& tr : trails)
    if (tr.edge == e) return tr.amount;
  return 0.0;
}

CrossroadTag::Trail* CrossroadTag::find(EdgeIndex e) {
  for (auto& tr : trails)
    if (tr.edge == e) return &tr;
  return nullptr;
}

void update_tag(CrossroadTag& tag, const ArrivalContext& ctx, const PheromoneParams& params) {
  CrossroadTag::Trail* arrival = tag.find(ctx.arrival_edge);
  if (arrival == nullptr)
    throw InvariantError("update_tag: edge " + std::to_string(ctx.arrival_edge) + " is not incident to crossroad " +
                         std::to_string(tag.crossroad));
  if (ctx.now < tag.ts)
    throw InvariantError("update_tag: time regression at crossroad " + std::to_string(tag.crossroad));

  const double decay = params.evaporation() * params.per_liter() * (ctx.now - tag.ts);
  for (auto& tr : tag.trails) tr.amount = std::max(0.0, tr.amount - decay);

  if (ctx.carrying) arrival->amount += params.per_liter() * ctx.waste_found;
  arrival->amount += params.diffusion() * ctx.last_max;
  tag.ts = ctx.now;
}

double max_pheromone(const CrossroadTag& tag) {
  double m = 0.0;
  for (const auto& tr : tag.trails) m = std::max(m, tr.amount);
  return m;
}

EdgeIndex select_edge(const CrossroadTag& tag, std::optional<EdgeIndex> came_from, double exploitation, Rng& rng,
                      bool avoid_backtrack) {
  if (tag.trails.empty()) throw InvariantError("select_edge: crossroad " + std::to_string(tag.crossroad) + " has no roads");
  if (tag.trails.size() == 1) return tag.trails.front().edge;

  std::vector<const CrossroadTag::Trail*> cand;
  cand.reserve(tag.trails.size());
  for (const auto& tr : tag.trails)
    if (!(avoid_backtrack && came_from && tr.edge == *came_from)) cand.push_back(&tr);
  if (cand.empty()) cand.push_back(&tag.trails.front());

  const double u = rng.uniform();
  const auto [lo, hi] = std::minmax_element(cand.begin(), cand.end(),
                                            [](const auto* a, const auto* b) { return a->amount < b->amount; });
  const double top = (*hi)->amount;
  if (u < exploitation && (*lo)->amount != top) {
    std::vector<EdgeIndex> best;
    for (const auto* c : cand)
      if (c->amount == top) best.push_back(c->edge);
    return best.size() == 1 ? best.front() : best[rng.below(best.size())];
  }
  return cand[rng.below(cand.size())]->edge;
}

}  // namespace urbanswarm

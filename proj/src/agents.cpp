#include "urbanswarm/agents.hpp"

#include <algorithm>
#include <string>

namespace urbanswarm {

// --- bins ------------------------------------------------------------------------

void bin_absorb(TrashBin& bin, Volume v) {
  if (!bin.accepts(v)) throw InvariantError("bin_absorb: deposit exceeds remaining capacity");
  bin.loose += v;
  while (bin.loose >= bin.unit && bin.packed_units < bin.slots()) {
    bin.loose -= bin.unit;
    ++bin.packed_units;
  }
}

bool bin_is_full(const TrashBin& bin, Volume drop) { return bin.remaining() < drop; }

// --- proximity ---------------------------------------------------------------------

ProximityIndex::ProximityIndex(const Scenario& s, double radius)
    : reach_(s.graph.edge_count()), mounted_(s.graph.edge_count()) {
  const RoadGraph& g = s.graph;
  for (std::size_t b = 0; b < s.bins.size(); ++b) {
    mounted_[s.bins[b].road].push_back({b, s.bins[b].offset});
    const Point p = s.bin_position(b);
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      const Road& r = g.edge(e);
      const Point a = g.node(r.a).pos;
      const Point d{g.node(r.b).pos.x - a.x, g.node(r.b).pos.y - a.y};
      const Point ap{a.x - p.x, a.y - p.y};
      // |a + d t - p|^2 <= radius^2 for t in [0, 1]
      const double qa = d.x * d.x + d.y * d.y;
      const double qb = 2 * (d.x * ap.x + d.y * ap.y);
      const double qc = ap.x * ap.x + ap.y * ap.y - radius * radius;
      double t0, t1;
      if (qa == 0) {
        if (qc > 0) continue;
        t0 = 0;
        t1 = 1;
      } else {
        const double disc = qb * qb - 4 * qa * qc;
        if (disc < 0) continue;
        const double root = std::sqrt(disc);
        t0 = std::max(0.0, (-qb - root) / (2 * qa));
        t1 = std::min(1.0, (-qb + root) / (2 * qa));
        if (t0 > t1) continue;
      }
      reach_[e].push_back({b, t0 * r.length, t1 * r.length});
    }
  }
  for (auto& m : mounted_)
    std::sort(m.begin(), m.end(), [](const Mount& l, const Mount& r) {
      return l.offset != r.offset ? l.offset < r.offset : l.bin < r.bin;
    });
}

// --- citizens ----------------------------------------------------------------------

namespace {

void try_drop(Citizen& c, World& w, EdgeIndex e, bool forward, double s0, double s1) {
  const double len = w.scenario.graph.edge(e).length;
  const double a0 = forward ? s0 : len - s1;
  const double a1 = forward ? s1 : len - s0;
  struct Hit {
    double entry;
    std::size_t bin;
  };
  std::vector<Hit> hits;
  for (const auto& rc : w.proximity.reach(e)) {
    if (rc.lo > a1 || rc.hi < a0) continue;
    const double entry = forward ? std::max(rc.lo, a0) : len - std::min(rc.hi, a1);
    hits.push_back({entry, rc.bin});
  }
  if (hits.empty()) return;
  std::sort(hits.begin(), hits.end(),
            [](const Hit& l, const Hit& r) { return l.entry != r.entry ? l.entry < r.entry : l.bin < r.bin; });
  for (const auto& h : hits) {
    TrashBin& bin = w.bins[h.bin];
    if (bin.accepts(c.carried)) {
      bin_absorb(bin, c.carried);
      c.carried = {};
      ++w.ledger.drops;
      return;
    }
    ++w.ledger.refused_drops;
  }
}

}  // namespace

void citizen_tick(Citizen& c, World& w, PathSource& paths, double now, double dt) {
  const RoadGraph& g = w.scenario.graph;
  double budget = w.params.citizen_speed / 60.0 * dt;
  if (!c.travelling) {
    if (c.next_trip >= c.itinerary.size() || c.itinerary[c.next_trip].depart > now) return;
    const Trip& trip = c.itinerary[c.next_trip];
    c.path = paths.path(c.pos.node, w.scenario.buildings[trip.building].anchor);
    c.path_step = 0;
    c.travelling = true;
    if (trip.parcel && c.carried.ml == 0) {
      c.carried = w.params.drop;
      w.ledger.generated += w.params.drop;
    }
    budget = w.params.citizen_speed / 60.0 * std::min(dt, now - trip.depart);
  }

  while (budget > 0 && c.path_step < c.path.size()) {
    if (!c.pos.on_edge()) {
      c.pos.edge = c.path[c.path_step];
      c.pos.along = 0;
    }
    const Road& road = g.edge(c.pos.edge);
    const double left = road.length - c.pos.along;
    const bool arrive = budget >= left;
    const double s0 = c.pos.along;
    const double s1 = arrive ? road.length : s0 + budget;
    if (c.carried.ml > 0) try_drop(c, w, c.pos.edge, road.a == c.pos.node, s0, s1);
    budget = arrive ? budget - (s1 - s0) : 0.0;  // a partial step spends the rest, or rounding can stall
    c.pos.along = s1;
    if (arrive) {
      c.pos = {road.other(c.pos.node), kNone, 0.0};
      ++c.path_step;
    }
  }
  if (c.path_step >= c.path.size()) {
    c.travelling = false;
    c.path.clear();
    c.path_step = 0;
    ++c.next_trip;
  }
}

// --- robots ------------------------------------------------------------------------

const char* to_string(RobotState s) {
  switch (s) {
    case RobotState::Wander: return "wander";
    case RobotState::Carry: return "carry";
    case RobotState::Recharge: return "recharge";
  }
  return "?";
}

namespace {

constexpr double kRangeSlack = 1e-6;  // meters of float drift tolerated before declaring stranding

void end_episode(Robot& r, double now, std::optional<double>& episode) {
  const double len = now - r.episode_start;
  episode = episode ? std::max(*episode, len) : len;
}

void begin(Robot& r, RobotState s, double now) {
  r.state = s;
  r.episode_start = now;
}

/// Robot stands at r.pos.node: handle deposit services, the battery check,
/// then choose the next road.
void decide(Robot& r, World& w, Rng& rng, double now, std::optional<double>& episode) {
  const RoadGraph& g = w.scenario.graph;
  const RoutingTable& rt = *w.routing;
  const NodeIndex here = r.pos.node;
  const RouteEntry& route = rt[here];
  const bool at_deposit = rt.is_deposit(here);
  const double sf = w.params.safety_factor;

  if (at_deposit && r.state == RobotState::Carry) {
    w.ledger.delivered += r.cargo->volume;
    ++w.ledger.deliveries;
    r.cargo.reset();
    r.state = RobotState::Wander;
    end_episode(r, now, episode);
    if (r.recharge_pending) r.range = w.params.robot_range;
    r.recharge_pending = false;
  } else if (at_deposit && r.state == RobotState::Recharge) {
    r.range = w.params.robot_range;
    r.state = RobotState::Wander;
    end_episode(r, now, episode);
  }

  if (!at_deposit && r.range <= sf * route.distance) {
    if (r.state == RobotState::Wander) begin(r, RobotState::Recharge, now);
    if (r.state == RobotState::Carry) r.recharge_pending = true;
  }

  EdgeIndex next = kNone;
  if (r.state == RobotState::Wander) {
    if (g.incident(here).empty()) {
      r.needs_decision = true;
      return;
    }
    next = select_edge(w.tags[here], r.came_from, w.pheromone.exploitation(), rng, w.params.avoid_backtrack);
    auto affordable = [&](EdgeIndex e) {
      return r.range - g.edge(e).length >= sf * rt[g.edge(e).other(here)].distance;
    };
    if (!affordable(next)) {
      if (at_deposit) {
        r.range = w.params.robot_range;
        if (!affordable(next)) {
          r.needs_decision = true;
          return;
        }
      } else {
        begin(r, RobotState::Recharge, now);
        next = route.next_hop;
      }
    }
  } else {
    next = route.next_hop;
  }
  r.pos = {here, next, 0.0};
  r.needs_decision = false;
}

void arrive(Robot& r, World& w, Rng& rng, double now, std::optional<double>& episode) {
  const EdgeIndex via = r.pos.edge;
  const NodeIndex here = w.scenario.graph.edge(via).other(r.pos.node);
  r.pos = {here, kNone, 0.0};
  r.came_from = via;
  ArrivalContext ctx;
  ctx.arrival_edge = via;
  ctx.now = now / 60.0;
  ctx.carrying = r.state == RobotState::Carry;
  ctx.waste_found = r.cargo ? r.cargo->waste_found : 0.0;
  ctx.last_max = r.last_max;
  update_tag(w.tags[here], ctx, w.pheromone);
  r.last_max = max_pheromone(w.tags[here]);
  decide(r, w, rng, now, episode);
}

void pick_up(Robot& r, World& w, std::size_t b, double now) {
  TrashBin& bin = w.bins[b];
  r.cargo = Cargo{bin.unit, bin.stored().liters()};
  --bin.packed_units;
  ++w.ledger.pickups;
  begin(r, RobotState::Carry, now);

  // Head for whichever end of the road is closer to a deposit overall.
  const RoadGraph& g = w.scenario.graph;
  const Road& road = g.edge(r.pos.edge);
  const NodeIndex ahead = road.other(r.pos.node);
  const double forward = (road.length - r.pos.along) + (*w.routing)[ahead].distance;
  const double back = r.pos.along + (*w.routing)[r.pos.node].distance;
  if (back < forward) r.pos = {ahead, r.pos.edge, road.length - r.pos.along};
}

}  // namespace

std::optional<double> robot_tick(Robot& r, World& w, Rng& rng, double now, double dt) {
  const RoadGraph& g = w.scenario.graph;
  std::optional<double> episode;
  double budget = w.params.robot_speed / 60.0 * dt;
  if (r.needs_decision) decide(r, w, rng, now, episode);

  while (budget > 0 && r.pos.on_edge()) {
    const Road& road = g.edge(r.pos.edge);
    const bool forward = road.a == r.pos.node;
    const double left = road.length - r.pos.along;
    const bool reaches_end = budget >= left;
    const double s1 = reaches_end ? road.length : r.pos.along + budget;

    if (r.state == RobotState::Wander) {
      std::optional<std::pair<double, std::size_t>> hit;
      for (const auto& m : w.proximity.mounted(r.pos.edge)) {
        const double o = forward ? m.offset : road.length - m.offset;
        const bool passed = o >= r.pos.along && (o < s1 || (reaches_end && o <= s1));
        if (passed && w.bins[m.bin].packed_units > 0 && (!hit || o < hit->first)) hit = {o, m.bin};
      }
      if (hit) {
        const double move = hit->first - r.pos.along;
        if (r.range + kRangeSlack < move) throw InvariantError("robot " + std::to_string(r.id) + " stranded");
        r.range = std::max(0.0, r.range - move);
        budget -= move;
        r.pos.along = hit->first;
        pick_up(r, w, hit->second, now);
        continue;
      }
    }

    const double move = s1 - r.pos.along;
    if (r.range + kRangeSlack < move) throw InvariantError("robot " + std::to_string(r.id) + " stranded");
    r.range = std::max(0.0, r.range - move);
    budget = reaches_end ? budget - move : 0.0;
    r.pos.along = s1;
    if (reaches_end) arrive(r, w, rng, now, episode);
  }
  return episode;
}

// --- truck -------------------------------------------------------------------------

std::vector<std::size_t> truck_route(const Scenario& s) {
  const std::size_t n = s.bins.size();
  std::vector<std::size_t> route;
  if (n == 0) return route;
  std::vector<bool> done(n, false);
  std::size_t cur = 0;
  for (std::size_t k = 0; k < n; ++k) {
    route.push_back(cur);
    done[cur] = true;
    std::size_t best = n;
    double best_d = 0;
    const Point p = s.bin_position(cur);
    for (std::size_t b = 0; b < n; ++b) {
      if (done[b]) continue;
      const double d = distance(p, s.bin_position(b));
      if (best == n || d < best_d) {
        best = b;
        best_d = d;
      }
    }
    cur = best;
  }
  return route;
}

void truck_tick(Truck& t, World& w, double now) {
  constexpr double kDay = 86400.0;
  const auto day = static_cast<std::int64_t>(std::floor(now / kDay));
  if (day != t.day) {
    t.day = day;
    t.next = 0;
    t.service_log.clear();
  }
  const double day_start = static_cast<double>(day) * kDay;
  while (t.next < t.route.size()) {
    const double slot = t.window_start + static_cast<double>(t.next + 1) * t.service_interval();
    if (slot > t.window_end || day_start + slot > now) break;
    TrashBin& bin = w.bins[t.route[t.next]];
    w.ledger.truck_collected += bin.stored();
    bin.loose = {};
    bin.packed_units = 0;
    ++w.ledger.bins_emptied;
    t.service_log.emplace_back(t.route[t.next], day_start + slot);
    ++t.next;
  }
}

}  // namespace urbanswarm

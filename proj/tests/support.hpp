#pragma once

// Independent oracles and generators shared by the unit suite and the
// acceptance runner. Nothing here calls into the code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "urbanswarm/agents.hpp"
#include "urbanswarm/engine.hpp"
#include "urbanswarm/scenario.hpp"
#include "urbanswarm/stigmergy.hpp"

namespace support {

using namespace urbanswarm;

inline bool within_ulps(double got, double want, int ulps = 1) {
  if (got == want) return true;
  double x = want;
  for (int i = 0; i < ulps; ++i) {
    x = std::nextafter(x, got);
    if (x == got) return true;
  }
  return false;
}

/// Scalar evaluation of the trail update for one road.
inline double reference_update(double p_ts, double evaporation, double per_liter, double elapsed, bool arrival,
                               bool carrying, double waste_found, double exploitation, double last_max) {
  double p = p_ts - evaporation * per_liter * elapsed;
  if (p < 0) p = 0;
  if (!arrival) return p;
  if (carrying) p += per_liter * waste_found;
  p += (1.0 - exploitation) * last_max;
  return p;
}

/// Tag on crossroad 0 with trails on edges 0..n-1.
inline CrossroadTag make_tag(const std::vector<double>& amounts, double ts = 0.0) {
  CrossroadTag t;
  t.crossroad = 0;
  t.ts = ts;
  for (std::size_t i = 0; i < amounts.size(); ++i) t.trails.push_back({static_cast<EdgeIndex>(i), amounts[i]});
  return t;
}

/// Single-source Dijkstra over an adjacency matrix, O(V^2), straight from the
/// road list.
inline std::vector<double> oracle_distances(const RoadGraph& g, NodeIndex source) {
  const std::size_t n = g.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, inf));
  for (const Road& r : g.roads()) {
    w[r.a][r.b] = std::min(w[r.a][r.b], r.length);
    w[r.b][r.a] = std::min(w[r.b][r.a], r.length);
  }
  std::vector<double> d(n, inf);
  std::vector<bool> done(n, false);
  d[source] = 0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && d[v] < inf && (u == n || d[v] < d[u])) u = v;
    if (u == n) break;
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v)
      if (w[u][v] < inf && d[u] + w[u][v] < d[v]) d[v] = d[u] + w[u][v];
  }
  return d;
}

/// Random connected road network with integer lengths (so path sums are
/// exact), shuffled ids, random bins and buildings.
inline Scenario random_scenario(std::uint64_t seed, std::size_t min_nodes, std::size_t max_nodes) {
  std::mt19937_64 gen(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(gen); };
  const std::size_t n = pick(min_nodes, max_nodes);
  RawScenario raw;
  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i * 7 + 3);
  std::shuffle(ids.begin(), ids.end(), gen);
  std::uniform_real_distribution<double> coord(0.0, 2000.0);
  std::vector<Point> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = {coord(gen), coord(gen)};
    raw.crossroads.push_back({ids[i], pos[i]});
  }
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add_road = [&](std::size_t a, std::size_t b) {
    if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second) return;
    const double eu = std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
    const double len = std::max(1.0, std::ceil(eu)) + static_cast<double>(pick(0, 40));
    raw.roads.push_back({static_cast<std::int64_t>(1000 + raw.roads.size() * 3), ids[a], ids[b], len});
  };
  for (std::size_t i = 1; i < n; ++i) add_road(i, pick(0, i - 1));
  const std::size_t extra = pick(0, n);
  for (std::size_t k = 0; k < extra; ++k) add_road(pick(0, n - 1), pick(0, n - 1));
  if (raw.roads.empty()) {
    // single crossroad: nothing to host bins
  } else {
    const std::size_t bins = pick(1, std::min<std::size_t>(raw.roads.size(), 30));
    for (std::size_t b = 0; b < bins; ++b) {
      const auto& r = raw.roads[pick(0, raw.roads.size() - 1)];
      raw.bins.push_back({static_cast<std::int64_t>(b), r.id, *r.length * 0.5});
    }
  }
  for (std::size_t b = 0; b < 6; ++b)
    raw.buildings.push_back({static_cast<std::int64_t>(b), ids[pick(0, n - 1)], static_cast<BuildingKind>(b % 3)});
  return build_scenario(raw);
}

inline DepositSet random_deposits(const Scenario& s, std::uint64_t seed, std::size_t k) {
  std::mt19937_64 gen(seed);
  std::vector<NodeIndex> nodes(s.graph.node_count());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<NodeIndex>(i);
  std::shuffle(nodes.begin(), nodes.end(), gen);
  DepositSet d;
  for (std::size_t i = 0; i < std::min(k, nodes.size()); ++i) d.push_back({static_cast<std::int64_t>(i), nodes[i]});
  return d;
}

/// The 20x20, 100 m, 50-bin grid used for every desk-scale check.
inline std::shared_ptr<const Scenario> desk_scenario() {
  static const auto s = std::make_shared<const Scenario>(generate_grid(20, 20, 100.0, 50, 300, 1));
  return s;
}

inline RunConfig desk_config(Mode mode, std::uint64_t seed) {
  RunConfig c;
  c.mode = mode;
  c.robots = 10;
  c.citizens = 1000;
  c.seed = seed;
  return c.normalized();
}

// --- property suites -----------------------------------------------------------

struct PropertyResult {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
  bool passed() const { return failures == 0 && cases > 0; }
};

inline CrossroadTag random_tag(std::mt19937_64& gen, std::size_t min_edges = 1) {
  std::uniform_int_distribution<std::size_t> ne(min_edges, 6);
  std::uniform_real_distribution<double> amt(0.0, 50.0);
  std::vector<double> a(ne(gen));
  for (auto& x : a) x = std::bernoulli_distribution(0.2)(gen) ? 0.0 : amt(gen);
  return make_tag(a, std::uniform_real_distribution<double>(0.0, 600.0)(gen));
}

inline PropertyResult prop_non_negative(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    CrossroadTag t = random_tag(gen);
    const PheromoneParams p(u(gen), std::max(1e-3, u(gen)), 4.0 * u(gen));
    const int steps = static_cast<int>(gen() % 20) + 1;
    bool ok = true;
    for (int s = 0; s < steps; ++s) {
      ArrivalContext c;
      c.arrival_edge = static_cast<EdgeIndex>(gen() % t.trails.size());
      c.now = t.ts + 200.0 * u(gen) * u(gen);
      c.carrying = u(gen) < 0.5;
      c.waste_found = 125.0 * u(gen);
      c.last_max = 60.0 * u(gen);
      update_tag(t, c, p);
      for (const auto& tr : t.trails) ok = ok && tr.amount >= 0;
    }
    r.check(ok, "negative trail after update sequence, case " + std::to_string(i));
  }
  return r;
}

inline PropertyResult prop_evaporation_monotone(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const CrossroadTag t0 = random_tag(gen);
    const PheromoneParams p(u(gen), std::max(1e-3, u(gen)), 4.0 * u(gen));
    const double d1 = 100.0 * u(gen);
    const double d2 = d1 + 100.0 * u(gen);
    ArrivalContext c;
    c.arrival_edge = static_cast<EdgeIndex>(gen() % t0.trails.size());
    c.carrying = false;
    c.last_max = 0;
    CrossroadTag a = t0, b = t0;
    c.now = t0.ts + d1;
    update_tag(a, c, p);
    c.now = t0.ts + d2;
    update_tag(b, c, p);
    bool ok = true;
    for (std::size_t k = 0; k < t0.trails.size(); ++k)
      ok = ok && a.trails[k].amount <= t0.trails[k].amount && b.trails[k].amount <= a.trails[k].amount;
    r.check(ok, "evaporation increased a trail, case " + std::to_string(i));
  }
  return r;
}

inline PropertyResult prop_marking_additive(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const CrossroadTag t0 = random_tag(gen);
    const PheromoneParams p(u(gen), std::max(1e-3, u(gen)), 4.0 * u(gen));
    ArrivalContext c;
    c.arrival_edge = static_cast<EdgeIndex>(gen() % t0.trails.size());
    c.now = t0.ts + 50.0 * u(gen);
    c.carrying = true;
    c.last_max = 0;
    const double a = 125.0 * u(gen);
    const double b = 125.0 * u(gen);
    CrossroadTag twice = t0, once = t0;
    c.waste_found = a;
    update_tag(twice, c, p);
    c.waste_found = b;
    update_tag(twice, c, p);
    c.waste_found = a + b;
    update_tag(once, c, p);
    const double x = twice.amount(c.arrival_edge);
    const double y = once.amount(c.arrival_edge);
    r.check(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)),
            "marking not additive, case " + std::to_string(i));
  }
  return r;
}

inline PropertyResult prop_argmax_scale_invariant(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t ne = 2 + gen() % 5;
    std::vector<double> a(ne);
    for (auto& x : a) x = static_cast<double>(gen() % 21);
    const double k = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(gen));
    std::vector<double> b(a);
    for (auto& x : b) x *= k;
    std::optional<EdgeIndex> from;
    if (u(gen) < 0.5) from = static_cast<EdgeIndex>(gen() % ne);
    const std::uint64_t draw_seed = gen();
    Rng r1(draw_seed), r2(draw_seed);
    const EdgeIndex e1 = select_edge(make_tag(a), from, 1.0, r1);
    const EdgeIndex e2 = select_edge(make_tag(b), from, 1.0, r2);
    r.check(e1 == e2, "scaling changed the exploited road, case " + std::to_string(i));
  }
  return r;
}

inline PropertyResult prop_slot_limit(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  for (int i = 0; i < n; ++i) {
    TrashBin bin;
    bin.capacity.ml = 10'000 + static_cast<std::int64_t>(gen() % 190'000);
    bin.unit.ml = 500 + static_cast<std::int64_t>(gen() % 49'500);
    std::int64_t total = 0;
    bool ok = true;
    const int drops = static_cast<int>(gen() % 40);
    for (int d = 0; d < drops; ++d) {
      Volume v;
      v.ml = static_cast<std::int64_t>(gen() % 15'000);
      if (!bin.accepts(v)) continue;
      bin_absorb(bin, v);
      total += v.ml;
      const std::int64_t slots = bin.capacity.ml / bin.unit.ml;
      const std::int64_t want_units = std::min(slots, total / bin.unit.ml);
      ok = ok && bin.packed_units == want_units && bin.loose.ml == total - want_units * bin.unit.ml &&
           bin.stored().ml == total;
    }
    r.check(ok, "packing arithmetic mismatch, case " + std::to_string(i));
  }
  return r;
}

inline PropertyResult prop_full_boundary(int n, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 gen(seed);
  for (int i = 0; i < n; ++i) {
    TrashBin bin;
    bin.capacity.ml = 20'000 + static_cast<std::int64_t>(gen() % 180'000);
    bin.unit.ml = 1'000 + static_cast<std::int64_t>(gen() % 20'000);
    Volume drop;
    drop.ml = 1 + static_cast<std::int64_t>(gen() % 19'999);
    const std::int64_t shift = static_cast<std::int64_t>(gen() % 3) - 1;  // -1, 0, +1 ml
    TrashBin b = bin;
    Volume fill;
    fill.ml = bin.capacity.ml - drop.ml - shift;
    if (fill.ml < 0 || fill.ml > bin.capacity.ml) {
      --i;
      continue;
    }
    bin_absorb(b, fill);
    const bool want_full = shift < 0;  // remaining = drop + shift
    r.check(bin_is_full(b, drop) == want_full && b.accepts(drop) == !want_full,
            "full-bin boundary wrong at remaining - drop = " + std::to_string(shift) + " ml, case " +
                std::to_string(i));
  }
  return r;
}

}  // namespace support

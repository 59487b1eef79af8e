#include "urbanswarm/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace urbanswarm {

using nlohmann::json;

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

const char* to_string(BuildingKind k) {
  switch (k) {
    case BuildingKind::Home: return "home";
    case BuildingKind::Work: return "work";
    case BuildingKind::Amenity: return "amenity";
  }
  return "?";
}

std::optional<BuildingKind> parse_building_kind(std::string_view s) {
  if (s == "home") return BuildingKind::Home;
  if (s == "work") return BuildingKind::Work;
  if (s == "amenity") return BuildingKind::Amenity;
  return std::nullopt;
}

// --- RoadGraph ---------------------------------------------------------------

RoadGraph::RoadGraph(std::vector<Crossroad> crossroads, std::vector<Road> roads)
    : crossroads_(std::move(crossroads)), roads_(std::move(roads)) {
  const auto n = crossroads_.size();
  std::vector<std::uint32_t> degree(n, 0);
  for (const auto& r : roads_) {
    if (r.a >= n || r.b >= n) throw ScenarioError("road " + std::to_string(r.id) + ": unknown endpoint");
    ++degree[r.a];
    if (r.b != r.a) ++degree[r.b];
  }
  adj_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) adj_offsets_[i + 1] = adj_offsets_[i] + degree[i];
  adj_.resize(adj_offsets_[n]);
  std::vector<std::uint32_t> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  // Roads are sorted by id, so filling in edge order keeps each list sorted.
  for (EdgeIndex e = 0; e < roads_.size(); ++e) {
    adj_[fill[roads_[e].a]++] = e;
    if (roads_[e].b != roads_[e].a) adj_[fill[roads_[e].b]++] = e;
  }
}

std::span<const EdgeIndex> RoadGraph::incident(NodeIndex n) const {
  return {adj_.data() + adj_offsets_[n], adj_offsets_[n + 1] - adj_offsets_[n]};
}

std::optional<NodeIndex> RoadGraph::find_node(std::int64_t id) const {
  auto it = std::lower_bound(crossroads_.begin(), crossroads_.end(), id,
                             [](const Crossroad& c, std::int64_t v) { return c.id < v; });
  if (it == crossroads_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - crossroads_.begin());
}

std::optional<EdgeIndex> RoadGraph::find_edge(std::int64_t id) const {
  auto it = std::lower_bound(roads_.begin(), roads_.end(), id,
                             [](const Road& r, std::int64_t v) { return r.id < v; });
  if (it == roads_.end() || it->id != id) return std::nullopt;
  return static_cast<EdgeIndex>(it - roads_.begin());
}

std::vector<NodeIndex> RoadGraph::unreachable_nodes() const {
  std::vector<NodeIndex> out;
  if (crossroads_.empty()) return out;
  std::vector<bool> seen(crossroads_.size(), false);
  std::vector<NodeIndex> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    NodeIndex v = stack.back();
    stack.pop_back();
    for (EdgeIndex e : incident(v)) {
      NodeIndex u = roads_[e].other(v);
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  for (NodeIndex v = 0; v < seen.size(); ++v)
    if (!seen[v]) out.push_back(v);
  return out;
}

Point RoadGraph::point_on(EdgeIndex e, double offset) const {
  const Road& r = roads_[e];
  const Point a = crossroads_[r.a].pos;
  const Point b = crossroads_[r.b].pos;
  const double t = r.length > 0 ? offset / r.length : 0.0;
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

// --- validation --------------------------------------------------------------

namespace {

template <class T, class Id>
void require_unique_sorted_ids(const std::vector<T>& v, Id id_of, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (id_of(v[i]) < 0) throw ScenarioError(std::string(what) + " " + std::to_string(id_of(v[i])) + ": negative id");
    if (i > 0 && id_of(v[i - 1]) >= id_of(v[i]))
      throw ScenarioError(std::string(what) + " " + std::to_string(id_of(v[i])) + ": duplicate id");
  }
}

}  // namespace

void validate(const Scenario& s) {
  const RoadGraph& g = s.graph;
  if (g.node_count() == 0) throw ScenarioError("scenario has no crossroads");
  std::vector<Crossroad> nodes(g.crossroads().begin(), g.crossroads().end());
  require_unique_sorted_ids(nodes, [](const Crossroad& c) { return c.id; }, "crossroad");
  for (const auto& c : nodes)
    if (!std::isfinite(c.pos.x) || !std::isfinite(c.pos.y))
      throw ScenarioError("crossroad " + std::to_string(c.id) + ": non-finite position");

  std::vector<Road> roads(g.roads().begin(), g.roads().end());
  require_unique_sorted_ids(roads, [](const Road& r) { return r.id; }, "road");
  for (const auto& r : roads) {
    const std::string tag = "road " + std::to_string(r.id);
    if (r.a >= g.node_count() || r.b >= g.node_count()) throw ScenarioError(tag + ": unknown endpoint");
    if (r.a == r.b) throw ScenarioError(tag + ": self-loop");
    if (!std::isfinite(r.length) || r.length <= 0) throw ScenarioError(tag + ": length must be positive");
  }

  require_unique_sorted_ids(s.buildings, [](const Building& b) { return b.id; }, "building");
  for (const auto& b : s.buildings)
    if (b.anchor >= g.node_count())
      throw ScenarioError("building " + std::to_string(b.id) + ": unknown crossroad");

  require_unique_sorted_ids(s.bins, [](const BinSite& b) { return b.id; }, "bin");
  for (const auto& b : s.bins) {
    const std::string tag = "bin " + std::to_string(b.id);
    if (b.road >= g.edge_count()) throw ScenarioError(tag + ": unknown road");
    if (!std::isfinite(b.offset) || b.offset < 0) throw ScenarioError(tag + ": negative offset");
    if (b.offset > g.edge(b.road).length) throw ScenarioError(tag + ": offset exceeds length");
  }

  require_unique_sorted_ids(s.deposits, [](const Deposit& d) { return d.id; }, "deposit");
  std::set<NodeIndex> used;
  for (const auto& d : s.deposits) {
    const std::string tag = "deposit " + std::to_string(d.id);
    if (d.crossroad >= g.node_count()) throw ScenarioError(tag + ": unknown crossroad");
    if (!used.insert(d.crossroad).second) throw ScenarioError(tag + ": crossroad already holds a deposit");
  }

  if (auto lost = g.unreachable_nodes(); !lost.empty())
    throw ScenarioError("disconnected graph: crossroad " + std::to_string(g.node(lost.front()).id) +
                        " is unreachable from crossroad " + std::to_string(g.node(0).id));
}

Scenario build_scenario(const RawScenario& raw) {
  auto nodes = raw.crossroads;
  std::sort(nodes.begin(), nodes.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].id == nodes[i - 1].id) throw ScenarioError("crossroad " + std::to_string(nodes[i].id) + ": duplicate id");

  std::vector<std::int64_t> ids;
  ids.reserve(nodes.size());
  for (const auto& c : nodes) ids.push_back(c.id);
  auto node_index = [&ids](std::int64_t id, const std::string& who) -> NodeIndex {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) throw ScenarioError(who + std::to_string(id));
    return static_cast<NodeIndex>(it - ids.begin());
  };

  auto raw_roads = raw.roads;
  std::sort(raw_roads.begin(), raw_roads.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  std::vector<Road> roads;
  roads.reserve(raw_roads.size());
  for (std::size_t i = 0; i < raw_roads.size(); ++i) {
    const auto& rr = raw_roads[i];
    const std::string tag = "road " + std::to_string(rr.id);
    if (i > 0 && raw_roads[i - 1].id == rr.id) throw ScenarioError(tag + ": duplicate id");
    Road r;
    r.id = rr.id;
    r.a = node_index(rr.a, tag + ": unknown endpoint ");
    r.b = node_index(rr.b, tag + ": unknown endpoint ");
    r.length_override = rr.length.has_value();
    r.length = rr.length ? *rr.length : distance(nodes[r.a].pos, nodes[r.b].pos);
    roads.push_back(r);
  }

  Scenario s;
  s.graph = RoadGraph(std::move(nodes), std::move(roads));

  for (const auto& rb : raw.buildings)
    s.buildings.push_back({rb.id, node_index(rb.crossroad, "building " + std::to_string(rb.id) + ": unknown crossroad "), rb.kind});
  std::sort(s.buildings.begin(), s.buildings.end(), [](const auto& l, const auto& r) { return l.id < r.id; });

  for (const auto& rb : raw.bins) {
    auto e = s.graph.find_edge(rb.road);
    if (!e) throw ScenarioError("bin " + std::to_string(rb.id) + ": unknown road " + std::to_string(rb.road));
    s.bins.push_back({rb.id, *e, rb.offset});
  }
  std::sort(s.bins.begin(), s.bins.end(), [](const auto& l, const auto& r) { return l.id < r.id; });

  for (const auto& rd : raw.deposits)
    s.deposits.push_back({rd.id, node_index(rd.crossroad, "deposit " + std::to_string(rd.id) + ": unknown crossroad ")});
  std::sort(s.deposits.begin(), s.deposits.end(), [](const auto& l, const auto& r) { return l.id < r.id; });

  validate(s);
  return s;
}

// --- JSON I/O ----------------------------------------------------------------

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(where + ": missing field '" + key + "'");
  return *it;
}

std::int64_t int_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ScenarioError(where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

double num_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return v.get<double>();
}

const json* section(const json& doc, const char* key, bool required) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw ScenarioError(std::string("missing section '") + key + "'");
    return nullptr;
  }
  if (!it->is_array()) throw ScenarioError(std::string("section '") + key + "': expected an array");
  return &*it;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario parse error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario: top level must be an object");

  RawScenario raw;
  const json* cs = section(doc, "crossroads", true);
  for (std::size_t i = 0; i < cs->size(); ++i) {
    const std::string w = "crossroads[" + std::to_string(i) + "]";
    raw.crossroads.push_back({int_field((*cs)[i], "id", w), {num_field((*cs)[i], "x", w), num_field((*cs)[i], "y", w)}});
  }
  const json* rs = section(doc, "roads", true);
  for (std::size_t i = 0; i < rs->size(); ++i) {
    const std::string w = "roads[" + std::to_string(i) + "]";
    const json& r = (*rs)[i];
    RawScenario::RawRoad rr{int_field(r, "id", w), int_field(r, "a", w), int_field(r, "b", w), std::nullopt};
    if (r.contains("length")) rr.length = num_field(r, "length", w);
    raw.roads.push_back(rr);
  }
  if (const json* bs = section(doc, "buildings", false)) {
    for (std::size_t i = 0; i < bs->size(); ++i) {
      const std::string w = "buildings[" + std::to_string(i) + "]";
      const json& k = field((*bs)[i], "kind", w);
      auto kind = k.is_string() ? parse_building_kind(k.get<std::string>()) : std::nullopt;
      if (!kind) throw ScenarioError(w + ".kind: expected one of home, work, amenity");
      raw.buildings.push_back({int_field((*bs)[i], "id", w), int_field((*bs)[i], "crossroad", w), *kind});
    }
  }
  if (const json* bs = section(doc, "bins", false)) {
    for (std::size_t i = 0; i < bs->size(); ++i) {
      const std::string w = "bins[" + std::to_string(i) + "]";
      raw.bins.push_back({int_field((*bs)[i], "id", w), int_field((*bs)[i], "road", w), num_field((*bs)[i], "offset", w)});
    }
  }
  if (const json* ds = section(doc, "deposits", false)) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const std::string w = "deposits[" + std::to_string(i) + "]";
      raw.deposits.push_back({int_field((*ds)[i], "id", w), int_field((*ds)[i], "crossroad", w)});
    }
  }
  return build_scenario(raw);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

std::string to_json(const Scenario& s) {
  const RoadGraph& g = s.graph;
  json doc = json::object();
  json& cs = doc["crossroads"] = json::array();
  for (const auto& c : g.crossroads()) cs.push_back({{"id", c.id}, {"x", c.pos.x}, {"y", c.pos.y}});
  json& rs = doc["roads"] = json::array();
  for (const auto& r : g.roads()) {
    json j = {{"id", r.id}, {"a", g.node(r.a).id}, {"b", g.node(r.b).id}};
    if (r.length_override) j["length"] = r.length;
    rs.push_back(j);
  }
  json& bs = doc["buildings"] = json::array();
  for (const auto& b : s.buildings) bs.push_back({{"id", b.id}, {"crossroad", g.node(b.anchor).id}, {"kind", to_string(b.kind)}});
  json& ts = doc["bins"] = json::array();
  for (const auto& b : s.bins) ts.push_back({{"id", b.id}, {"road", g.edge(b.road).id}, {"offset", b.offset}});
  if (!s.deposits.empty()) {
    json& ds = doc["deposits"] = json::array();
    for (const auto& d : s.deposits) ds.push_back({{"id", d.id}, {"crossroad", g.node(d.crossroad).id}});
  }
  return doc.dump(1) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(s);
}

// --- synthetic grid ----------------------------------------------------------

Scenario generate_grid(int rows, int cols, double edge_len, int n_bins, int n_buildings, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ConfigError("grid needs rows >= 2 and cols >= 2");
  if (!(edge_len > 0) || !std::isfinite(edge_len)) throw ConfigError("grid edge length must be positive");
  if (n_bins < 0 || n_buildings < 0) throw ConfigError("bin and building counts must be non-negative");
  const std::size_t n_edges = static_cast<std::size_t>(rows) * (cols - 1) + static_cast<std::size_t>(cols) * (rows - 1);
  if (static_cast<std::size_t>(n_bins) > n_edges)
    throw ConfigError("requested " + std::to_string(n_bins) + " bins but only " + std::to_string(n_edges) + " edges exist");

  std::vector<Crossroad> nodes;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      nodes.push_back({static_cast<std::int64_t>(r) * cols + c, {c * edge_len, r * edge_len}});

  std::vector<Road> roads;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto v = static_cast<NodeIndex>(r * cols + c);
      if (c + 1 < cols) roads.push_back({static_cast<std::int64_t>(roads.size()), v, v + 1, edge_len, true});
      if (r + 1 < rows) roads.push_back({static_cast<std::int64_t>(roads.size()), v, static_cast<NodeIndex>(v + cols), edge_len, true});
    }
  }

  Rng rng(seed);
  std::vector<EdgeIndex> pick(n_edges);
  std::iota(pick.begin(), pick.end(), 0u);
  for (int i = 0; i < n_bins; ++i) {
    auto j = i + rng.below(n_edges - i);
    std::swap(pick[i], pick[j]);
  }
  pick.resize(n_bins);
  std::sort(pick.begin(), pick.end());

  Scenario s;
  for (int i = 0; i < n_bins; ++i) s.bins.push_back({i, pick[i], edge_len / 2});
  for (int i = 0; i < n_buildings; ++i)
    s.buildings.push_back({i, static_cast<NodeIndex>(rng.below(nodes.size())), static_cast<BuildingKind>(i % 3)});
  s.graph = RoadGraph(std::move(nodes), std::move(roads));
  validate(s);
  return s;
}

// --- k-means deposit placement ----------------------------------------------

namespace {

double sq(double v) { return v * v; }
double dist2(Point a, Point b) { return sq(a.x - b.x) + sq(a.y - b.y); }

std::size_t nearest(std::span<const Point> centroids, Point p) {
  std::size_t best = 0;
  double best_d = dist2(centroids[0], p);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    double d = dist2(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans_bins(const Scenario& s, std::size_t k, std::uint64_t seed, int max_iters) {
  const std::size_t n = s.bins.size();
  if (k < 1) throw ConfigError("deposit count must be at least 1");
  if (k > n) throw ConfigError("deposit count " + std::to_string(k) + " exceeds bin count " + std::to_string(n));

  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = s.bin_position(i);

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  KMeansResult res;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
    res.centroids.push_back(pts[order[i]]);
  }

  auto assign = [&] {
    std::vector<std::size_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = nearest(res.centroids, pts[i]);
    return a;
  };

  res.assignment = assign();
  while (res.iterations < max_iters) {
    std::vector<Point> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[res.assignment[i]].x += pts[i].x;
      sum[res.assignment[i]].y += pts[i].y;
      ++count[res.assignment[i]];
    }
    const auto previous = res.centroids;
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) {
        res.centroids[c] = {sum[c].x / count[c], sum[c].y / count[c]};
        continue;
      }
      // Empty cluster: reseed at the bin farthest from its own centroid.
      std::size_t far = n;
      double far_d = -1;
      for (std::size_t i = 0; i < n; ++i) {
        double d = dist2(previous[res.assignment[i]], pts[i]);
        if (!taken[i] && d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[far] = true;
      res.centroids[c] = pts[far];
    }
    ++res.iterations;
    auto next = assign();
    if (next == res.assignment) {
      res.converged = true;
      break;
    }
    res.assignment = std::move(next);
  }
  return res;
}

DepositSet snap_to_crossroads(const RoadGraph& g, std::span<const Point> centroids) {
  if (centroids.size() > g.node_count())
    throw ConfigError("deposit count " + std::to_string(centroids.size()) + " exceeds crossroad count " +
                      std::to_string(g.node_count()));
  std::vector<bool> used(g.node_count(), false);
  DepositSet out;
  std::vector<std::pair<double, NodeIndex>> ranked(g.node_count());
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    for (NodeIndex v = 0; v < g.node_count(); ++v) ranked[v] = {dist2(g.node(v).pos, centroids[c]), v};
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [d, v] : ranked) {
      if (!used[v]) {
        used[v] = true;
        out.push_back({static_cast<std::int64_t>(c), v});
        break;
      }
    }
  }
  return out;
}

DepositSet place_deposits(const Scenario& s, std::size_t k, std::uint64_t seed, int max_iters) {
  if (k > s.graph.node_count())
    throw ConfigError("deposit count " + std::to_string(k) + " exceeds crossroad count " +
                      std::to_string(s.graph.node_count()));
  auto km = kmeans_bins(s, k, seed, max_iters);
  return snap_to_crossroads(s.graph, km.centroids);
}

// --- routing -----------------------------------------------------------------

RoutingTable build_routing(const Scenario& s, const DepositSet& deposits) {
  const RoadGraph& g = s.graph;
  if (deposits.empty()) throw ConfigError("routing needs at least one deposit");
  const auto n = g.node_count();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Labels are ordered by (distance, deposit id): equally near deposits
  // resolve to the smaller id.
  std::vector<double> dist(n, inf);
  std::vector<std::int64_t> dep_id(n, std::numeric_limits<std::int64_t>::max());
  std::vector<std::size_t> dep_index(n, 0);
  std::vector<bool> is_dep(n, false);
  using Label = std::tuple<double, std::int64_t, NodeIndex>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  for (std::size_t i = 0; i < deposits.size(); ++i) {
    const auto v = deposits[i].crossroad;
    if (v >= n) throw ConfigError("deposit " + std::to_string(deposits[i].id) + ": unknown crossroad");
    if (is_dep[v]) throw ConfigError("deposit " + std::to_string(deposits[i].id) + ": crossroad already holds a deposit");
    is_dep[v] = true;
    dist[v] = 0;
    dep_id[v] = deposits[i].id;
    dep_index[v] = i;
    pq.emplace(0.0, deposits[i].id, v);
  }
  while (!pq.empty()) {
    auto [d, id, v] = pq.top();
    pq.pop();
    if (d != dist[v] || id != dep_id[v]) continue;
    for (EdgeIndex e : g.incident(v)) {
      const NodeIndex u = g.edge(e).other(v);
      const double nd = d + g.edge(e).length;
      if (nd < dist[u] || (nd == dist[u] && id < dep_id[u])) {
        dist[u] = nd;
        dep_id[u] = id;
        dep_index[u] = dep_index[v];
        pq.emplace(nd, id, u);
      }
    }
  }

  std::vector<RouteEntry> entries(n);
  for (NodeIndex v = 0; v < n; ++v) {
    entries[v].distance = dist[v];
    entries[v].deposit = dep_index[v];
    if (is_dep[v]) continue;
    for (EdgeIndex e : g.incident(v)) {
      const NodeIndex u = g.edge(e).other(v);
      if (dep_id[u] == dep_id[v] && dist[u] + g.edge(e).length == dist[v] && dist[u] < dist[v]) {
        entries[v].next_hop = e;
        break;
      }
    }
    if (entries[v].next_hop == kNone)
      throw InvariantError("routing: crossroad " + std::to_string(g.node(v).id) + " has no next hop");
  }
  return RoutingTable(std::move(entries), std::move(is_dep));
}

std::vector<EdgeIndex> shortest_path_tree(const RoadGraph& g, NodeIndex target) {
  const auto n = g.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Label = std::pair<double, NodeIndex>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  dist[target] = 0;
  pq.emplace(0.0, target);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d != dist[v]) continue;
    for (EdgeIndex e : g.incident(v)) {
      const NodeIndex u = g.edge(e).other(v);
      const double nd = d + g.edge(e).length;
      if (nd < dist[u]) {
        dist[u] = nd;
        pq.emplace(nd, u);
      }
    }
  }
  std::vector<EdgeIndex> next(n, kNone);
  for (NodeIndex v = 0; v < n; ++v) {
    if (v == target) continue;
    for (EdgeIndex e : g.incident(v)) {
      const NodeIndex u = g.edge(e).other(v);
      if (dist[u] + g.edge(e).length == dist[v] && dist[u] < dist[v]) {
        next[v] = e;
        break;
      }
    }
  }
  return next;
}

std::vector<EdgeIndex> shortest_path(const RoadGraph& g, NodeIndex from, NodeIndex to) {
  const auto next = shortest_path_tree(g, to);
  std::vector<EdgeIndex> path;
  for (NodeIndex v = from; v != to;) {
    const EdgeIndex e = next[v];
    if (e == kNone) throw InvariantError("no path between crossroads");
    path.push_back(e);
    v = g.edge(e).other(v);
  }
  return path;
}

}  // namespace urbanswarm

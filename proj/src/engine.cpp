#include "urbanswarm/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace urbanswarm {

using nlohmann::json;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::MPF: return "mpf";
    case Mode::CPF: return "cpf";
    case Mode::Truck: return "truck";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "mpf" || s == "MPF") return Mode::MPF;
  if (s == "cpf" || s == "CPF") return Mode::CPF;
  if (s == "truck" || s == "TRUCK") return Mode::Truck;
  return std::nullopt;
}

// --- configuration -------------------------------------------------------------

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <class T, std::size_t N>
bool one_of(T v, const T (&set)[N]) {
  return std::find(std::begin(set), std::end(set), v) != std::end(set);
}

constexpr double kSecondsPerDay = 86400.0;

}  // namespace

RunConfig RunConfig::normalized() const {
  RunConfig c = *this;
  if (c.mode == Mode::CPF) c.deposits = 1;
  if (c.mode == Mode::Truck) c.robots = 0;

  require(c.robots >= 0, "robots: must be >= 0");
  require(c.evaporation_rate >= 0 && c.evaporation_rate <= 1,
          "evaporation_rate: E_r must satisfy 0 <= E_r <= 1 (got " + format_double(c.evaporation_rate) + ")");
  require(c.exploitation_rate > 0 && c.exploitation_rate <= 1,
          "exploitation_rate: X_r must satisfy 0 < X_r <= 1 (got " + format_double(c.exploitation_rate) + ")");
  require(c.bin_capacity_liters > 0 && std::isfinite(c.bin_capacity_liters), "bin_capacity_liters: must be > 0");
  require(c.unit_liters >= 0.001 && c.unit_liters <= c.bin_capacity_liters,
          "unit_liters: C_w must be in (0, bin_capacity_liters]");
  require(c.mode == Mode::Truck || c.deposits >= 1, "deposits: D_n must be >= 1");
  require(c.waste_liters >= 0.001 && c.waste_liters <= c.bin_capacity_liters,
          "waste_liters: lambda must be in (0, bin_capacity_liters]");
  require(c.drop_radius_m >= 0 && std::isfinite(c.drop_radius_m), "drop_radius_m: phi must be >= 0");
  require(c.citizens >= 0, "citizens: must be >= 0");
  require(c.pheromone_per_liter >= 0 && std::isfinite(c.pheromone_per_liter), "pheromone_per_liter: P_a must be >= 0");
  require(c.citizen_speed > 0 && std::isfinite(c.citizen_speed), "citizen_speed_m_per_min: must be > 0");
  require(c.robot_speed > 0 && std::isfinite(c.robot_speed), "robot_speed_m_per_min: must be > 0");
  require(c.robot_range_m > 0 && std::isfinite(c.robot_range_m), "robot_range_m: must be > 0");
  require(c.safety_factor >= 1 && std::isfinite(c.safety_factor), "safety_factor: must be >= 1");
  require(c.tick_seconds > 0 && c.tick_seconds <= 3600, "tick_seconds: must be in (0, 3600]");
  require(c.days >= 1, "days: must be >= 1");
  require(c.kmeans_max_iters >= 1, "kmeans_max_iters: must be >= 1");
  require(c.truck_bins_per_hour > 0 && std::isfinite(c.truck_bins_per_hour), "truck_bins_per_hour: must be > 0");
  require(c.truck_start_min >= 0 && c.truck_start_min < c.truck_end_min && c.truck_end_min <= 1440,
          "truck_start_min/truck_end_min: need 0 <= start < end <= 1440");
  return c;
}

std::vector<std::string> RunConfig::flags() const {
  std::vector<std::string> out;
  static constexpr int kRobots[] = {20, 35, 50};
  static constexpr double kEvap[] = {0.05, 0.15, 0.30};
  static constexpr double kExploit[] = {0.6, 0.75, 0.9};
  static constexpr double kUnit[] = {6, 12, 18};
  static constexpr int kDeposits[] = {2, 3, 5};
  if (mode != Mode::Truck && !one_of(robots, kRobots)) out.push_back("robots outside {20, 35, 50}");
  if (mode != Mode::Truck && !one_of(evaporation_rate, kEvap)) out.push_back("evaporation_rate outside {0.05, 0.15, 0.3}");
  if (mode != Mode::Truck && !one_of(exploitation_rate, kExploit)) out.push_back("exploitation_rate outside {0.6, 0.75, 0.9}");
  if (mode != Mode::Truck && !one_of(unit_liters, kUnit)) out.push_back("unit_liters outside {6, 12, 18}");
  if (mode == Mode::MPF && !one_of(deposits, kDeposits)) out.push_back("deposits outside {2, 3, 5}");
  return out;
}

namespace {

struct KeyBinding {
  const char* key;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <class T>
T as(const json& v, const char* key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(std::string(key) + ": expected true or false");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) return v.get<T>();
      if (v.get<std::int64_t>() < 0) throw ConfigError(std::string(key) + ": expected a non-negative integer");
      return static_cast<T>(v.get<std::int64_t>());
    } else {
      const auto x = v.get<std::int64_t>();
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max())
        throw ConfigError(std::string(key) + ": integer out of range");
      return static_cast<T>(x);
    }
  } else {
    if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return v.get<T>();
  }
}

#define US_BIND(name, member, type) \
  KeyBinding { name, [](const RunConfig& c) { return json(c.member); }, [](RunConfig& c, const json& v) { c.member = as<type>(v, name); } }

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> b = {
      {"mode", [](const RunConfig& c) { return json(to_string(c.mode)); },
       [](RunConfig& c, const json& v) {
         auto m = v.is_string() ? parse_mode(v.get<std::string>()) : std::nullopt;
         if (!m) throw ConfigError("mode: expected one of mpf, cpf, truck");
         c.mode = *m;
       }},
      US_BIND("robots", robots, int),
      US_BIND("evaporation_rate", evaporation_rate, double),
      US_BIND("exploitation_rate", exploitation_rate, double),
      US_BIND("unit_liters", unit_liters, double),
      US_BIND("deposits", deposits, int),
      US_BIND("waste_liters", waste_liters, double),
      US_BIND("drop_radius_m", drop_radius_m, double),
      US_BIND("citizens", citizens, int),
      US_BIND("pheromone_per_liter", pheromone_per_liter, double),
      US_BIND("citizen_speed_m_per_min", citizen_speed, double),
      US_BIND("robot_speed_m_per_min", robot_speed, double),
      US_BIND("robot_range_m", robot_range_m, double),
      US_BIND("safety_factor", safety_factor, double),
      US_BIND("tick_seconds", tick_seconds, double),
      US_BIND("days", days, int),
      US_BIND("seed", seed, std::uint64_t),
      US_BIND("placement_seed", placement_seed, std::uint64_t),
      US_BIND("kmeans_max_iters", kmeans_max_iters, int),
      US_BIND("bin_capacity_liters", bin_capacity_liters, double),
      US_BIND("truck_bins_per_hour", truck_bins_per_hour, double),
      US_BIND("truck_start_min", truck_start_min, double),
      US_BIND("truck_end_min", truck_end_min, double),
      US_BIND("avoid_backtrack", avoid_backtrack, bool),
      {"robot_start", [](const RunConfig& c) { return json(c.robot_start == RobotStart::Random ? "random" : "deposits"); },
       [](RunConfig& c, const json& v) {
         if (v == "deposits") c.robot_start = RobotStart::Deposits;
         else if (v == "random") c.robot_start = RobotStart::Random;
         else throw ConfigError("robot_start: expected deposits or random");
       }},
      US_BIND("check_invariants", check_invariants, bool),
  };
  return b;
}

#undef US_BIND

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& b : bindings()) k.emplace_back(b.key);
    return k;
  }();
  return keys;
}

json to_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& b : bindings()) j[b.key] = b.get(c);
  return j;
}

RunConfig config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) throw ConfigError("config: expected a flat object of key/value pairs");
  for (const auto& [key, value] : j.items()) {
    auto it = std::find_if(bindings().begin(), bindings().end(), [&](const KeyBinding& b) { return key == b.key; });
    if (it == bindings().end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(base, value);
  }
  return base;
}

void apply_override(json& flat, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "': expected key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  flat[key] = value;
}

// --- metrics -------------------------------------------------------------------

json to_json(const DayMetrics& m) {
  const auto& l = m.ledger;
  return json{
      {"aut", m.aut},
      {"ftb", m.ftb},
      {"ticks", m.ticks},
      {"generated_liters", l.generated.liters()},
      {"delivered_liters", l.delivered.liters()},
      {"truck_collected_liters", l.truck_collected.liters()},
      {"drops", l.drops},
      {"refused_drops", l.refused_drops},
      {"pickups", l.pickups},
      {"deliveries", l.deliveries},
      {"bins_emptied", l.bins_emptied},
      {"max_episode_seconds", m.max_episode_seconds},
  };
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "tick,uncollected_liters,full_bins,robots_wander,robots_carry,robots_recharge,delivered_liters\n";
  for (const auto& r : rows) {
    out += std::to_string(r.tick) + ',' + format_double(r.uncollected_liters) + ',' + std::to_string(r.full_bins) + ',' +
           std::to_string(r.robots_in_state[0]) + ',' + std::to_string(r.robots_in_state[1]) + ',' +
           std::to_string(r.robots_in_state[2]) + ',' + format_double(r.delivered_liters) + '\n';
  }
  return out;
}

// --- simulation ------------------------------------------------------------------

std::vector<EdgeIndex> Simulation::Paths::path(NodeIndex from, NodeIndex to) {
  auto it = trees_.find(to);
  if (it == trees_.end()) it = trees_.emplace(to, shortest_path_tree(*graph_, to)).first;
  const auto& next = it->second;
  std::vector<EdgeIndex> out;
  for (NodeIndex v = from; v != to; v = graph_->edge(next[v]).other(v)) out.push_back(next[v]);
  return out;
}

namespace {

constexpr std::uint64_t kCitizenStream = 0xC171'2E45'0000'0001ULL;
constexpr std::uint64_t kRobotStream = 0x5EED'0B07'0000'0002ULL;

// Activity windows for the simplified daily schedule (seconds of day).
constexpr std::pair<double, double> kWindows[3] = {
    {7 * 3600.0, 9 * 3600.0}, {12 * 3600.0, 14 * 3600.0}, {17 * 3600.0, 19 * 3600.0}};

}  // namespace

Simulation::Simulation(const RunConfig& config, std::shared_ptr<const Scenario> scenario)
    : config_(config.normalized()), scenario_(std::move(scenario)) {
  const Scenario& s = *scenario_;
  const RunConfig& c = config_;
  if (c.mode != Mode::Truck) {
    if (static_cast<std::size_t>(c.deposits) > s.graph.node_count())
      throw ConfigError("deposits: D_n = " + std::to_string(c.deposits) + " exceeds crossroad count " +
                        std::to_string(s.graph.node_count()));
    if (s.deposits.size() == static_cast<std::size_t>(c.deposits))
      deposits_ = s.deposits;
    else
      deposits_ = place_deposits(s, static_cast<std::size_t>(c.deposits), c.placement_seed, c.kmeans_max_iters);
  }
  build_derived();

  if (c.mode != Mode::Truck)
    for (NodeIndex v = 0; v < s.graph.node_count(); ++v) tags_.push_back(CrossroadTag::blank(s.graph, v, routing_[v]));

  TrashBin blank_bin;
  blank_bin.capacity = Volume::from_liters(c.bin_capacity_liters);
  blank_bin.unit = Volume::from_liters(c.unit_liters);
  bins_.assign(s.bins.size(), blank_bin);

  if (c.citizens > 0) {
    if (s.buildings.empty()) throw ConfigError("citizens: scenario has no buildings to host citizens");
    std::array<std::vector<std::size_t>, 3> by_kind;
    for (std::size_t b = 0; b < s.buildings.size(); ++b) by_kind[static_cast<int>(s.buildings[b].kind)].push_back(b);
    std::vector<std::size_t> all(s.buildings.size());
    for (std::size_t b = 0; b < all.size(); ++b) all[b] = b;
    for (auto& k : by_kind)
      if (k.empty()) k = all;

    Rng crng(mix64(c.seed ^ kCitizenStream));
    citizens_.resize(static_cast<std::size_t>(c.citizens));
    for (std::size_t i = 0; i < citizens_.size(); ++i) {
      Citizen& z = citizens_[i];
      z.id = i;
      std::size_t place[3];
      for (int k = 0; k < 3; ++k) place[k] = by_kind[k][crng.below(by_kind[k].size())];
      z.pos.node = s.buildings[place[0]].anchor;
      const std::size_t dest[3] = {place[1], place[2], place[0]};  // work, amenity, home
      for (int d = 0; d < c.days; ++d) {
        const auto parcel = crng.below(3);
        for (int t = 0; t < 3; ++t) {
          const double depart = d * kSecondsPerDay + crng.uniform(kWindows[t].first, kWindows[t].second);
          z.itinerary.push_back({depart, dest[t], static_cast<std::uint64_t>(t) == parcel});
        }
      }
    }
  }

  rng_ = Rng(mix64(c.seed ^ kRobotStream));
  for (int i = 0; i < c.robots; ++i) {
    Robot r;
    r.id = static_cast<std::size_t>(i);
    r.pos.node = c.robot_start == RobotStart::Random
                     ? static_cast<NodeIndex>(rng_.below(s.graph.node_count()))
                     : deposits_[static_cast<std::size_t>(i) % deposits_.size()].crossroad;
    r.range = c.robot_range_m;
    robots_.push_back(r);
  }

  if (c.mode == Mode::Truck) {
    Truck t;
    t.route = truck_route(s);
    t.bins_per_hour = c.truck_bins_per_hour;
    t.window_start = c.truck_start_min * 60.0;
    t.window_end = c.truck_end_min * 60.0;
    truck_ = std::move(t);
  }

  total_ticks_ = std::llround(c.days * kSecondsPerDay / c.tick_seconds);
}

void Simulation::build_derived() {
  const Scenario& s = *scenario_;
  if (config_.mode != Mode::Truck) routing_ = build_routing(s, deposits_);
  proximity_ = std::make_unique<ProximityIndex>(s, config_.drop_radius_m);
  pheromone_ = std::make_unique<PheromoneParams>(config_.evaporation_rate, config_.exploitation_rate,
                                                 config_.pheromone_per_liter);
  agent_params_.drop = Volume::from_liters(config_.waste_liters);
  agent_params_.citizen_speed = config_.citizen_speed;
  agent_params_.robot_speed = config_.robot_speed;
  agent_params_.robot_range = config_.robot_range_m;
  agent_params_.safety_factor = config_.safety_factor;
  agent_params_.avoid_backtrack = config_.avoid_backtrack;
  paths_ = std::make_unique<Paths>(&s.graph);
}

World Simulation::world() {
  return World{*scenario_, config_.mode == Mode::Truck ? nullptr : &routing_, *proximity_, *pheromone_, agent_params_,
               bins_,      tags_,                                            ledger_};
}

void Simulation::tick() {
  ++clock_;
  const double now = now_seconds();
  const double dt = config_.tick_seconds;
  World w = world();
  for (auto& c : citizens_) citizen_tick(c, w, *paths_, now, dt);
  for (auto& r : robots_)
    if (auto ep = robot_tick(r, w, rng_, now, dt)) max_episode_ = std::max(max_episode_, *ep);
  if (truck_) truck_tick(*truck_, w, now);

  const Volume in_bins = waste_in_bins();
  std::int64_t full = 0;
  for (const auto& b : bins_) full += bin_is_full(b, agent_params_.drop) ? 1 : 0;
  uncollected_ml_sum_ += in_bins.ml;
  full_bins_sum_ += full;

  if (tracing_) {
    TraceRow row;
    row.tick = clock_;
    row.uncollected_liters = in_bins.liters();
    row.full_bins = full;
    for (const auto& r : robots_) ++row.robots_in_state[static_cast<int>(r.state)];
    row.delivered_liters = ledger_.delivered.liters();
    trace_.push_back(row);
  }
  if (config_.check_invariants) check_invariants();
}

void Simulation::run(std::int64_t ticks) {
  for (std::int64_t i = 0; i < ticks && !finished(); ++i) tick();
}

void Simulation::run_to_end() {
  while (!finished()) tick();
}

Volume Simulation::waste_in_bins() const {
  Volume v;
  for (const auto& b : bins_) v += b.stored();
  return v;
}

Volume Simulation::waste_on_robots() const {
  Volume v;
  for (const auto& r : robots_)
    if (r.cargo) v += r.cargo->volume;
  return v;
}

Volume Simulation::waste_with_citizens() const {
  Volume v;
  for (const auto& c : citizens_) v += c.carried;
  return v;
}

void Simulation::check_invariants() const {
  auto fail = [&](const std::string& what) {
    throw InvariantError("tick " + std::to_string(clock_) + ": " + what);
  };
  const Volume accounted =
      waste_in_bins() + waste_on_robots() + waste_with_citizens() + ledger_.delivered + ledger_.truck_collected;
  if (accounted != ledger_.generated)
    fail("waste not conserved: generated " + std::to_string(ledger_.generated.ml) + " ml, accounted " +
         std::to_string(accounted.ml) + " ml");
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const TrashBin& b = bins_[i];
    if (b.loose.ml < 0 || b.packed_units < 0 || b.packed_units > b.slots() || b.stored() > b.capacity)
      fail("bin " + std::to_string(i) + " out of bounds");
    if (b.packed_units < b.slots() && b.loose >= b.unit) fail("bin " + std::to_string(i) + " left waste unpacked");
  }
  for (const auto& r : robots_) {
    if (r.range < 0) fail("robot " + std::to_string(r.id) + " has negative range");
    if (r.cargo.has_value() != (r.state == RobotState::Carry))
      fail("robot " + std::to_string(r.id) + " cargo does not match its state");
  }
  for (const auto& c : citizens_)
    if (c.carried.ml != 0 && c.carried != agent_params_.drop) fail("citizen " + std::to_string(c.id) + " carries a partial parcel");
  for (const auto& t : tags_)
    for (const auto& tr : t.trails)
      if (!(tr.amount >= 0)) fail("negative pheromone at crossroad " + std::to_string(t.crossroad));
}

DayMetrics Simulation::metrics() const {
  DayMetrics m;
  m.ticks = clock_;
  m.ledger = ledger_;
  m.max_episode_seconds = max_episode_;
  if (clock_ > 0 && !bins_.empty()) {
    const double denom = static_cast<double>(clock_) * static_cast<double>(bins_.size());
    m.aut = static_cast<double>(uncollected_ml_sum_) / (denom * static_cast<double>(bins_.front().capacity.ml));
    m.ftb = static_cast<double>(full_bins_sum_) / denom;
  }
  m.trace = trace_;
  return m;
}

DayMetrics run_day(const RunConfig& config, std::shared_ptr<const Scenario> scenario) {
  Simulation sim(config, std::move(scenario));
  sim.run_to_end();
  return sim.metrics();
}

// --- snapshots ---------------------------------------------------------------------

namespace {

constexpr const char* kSnapshotFormat = "urbanswarm-snapshot";
constexpr int kSnapshotVersion = 1;

json pos_json(const Position& p) { return {p.node, p.edge, p.along}; }
Position pos_from(const json& j) { return {j.at(0).get<NodeIndex>(), j.at(1).get<EdgeIndex>(), j.at(2).get<double>()}; }

json ledger_json(const WasteLedger& l) {
  return {l.generated.ml, l.delivered.ml, l.truck_collected.ml, l.drops, l.refused_drops, l.pickups, l.deliveries,
          l.bins_emptied};
}
WasteLedger ledger_from(const json& j) {
  WasteLedger l;
  l.generated.ml = j.at(0);
  l.delivered.ml = j.at(1);
  l.truck_collected.ml = j.at(2);
  l.drops = j.at(3);
  l.refused_drops = j.at(4);
  l.pickups = j.at(5);
  l.deliveries = j.at(6);
  l.bins_emptied = j.at(7);
  return l;
}

}  // namespace

std::string Simulation::snapshot() const {
  json j;
  j["format"] = kSnapshotFormat;
  j["version"] = kSnapshotVersion;
  j["config"] = to_json(config_);
  j["scenario"] = json::parse(to_json(*scenario_));
  json deps = json::array();
  for (const auto& d : deposits_) deps.push_back({d.id, d.crossroad});
  j["deposits"] = deps;
  j["clock"] = clock_;
  j["rng"] = rng_.state();
  j["ledger"] = ledger_json(ledger_);
  j["accumulators"] = {uncollected_ml_sum_, full_bins_sum_, max_episode_};

  json bins = json::array();
  for (const auto& b : bins_) bins.push_back({b.loose.ml, b.packed_units});
  j["bins"] = bins;

  json tags = json::array();
  for (const auto& t : tags_) {
    json amounts = json::array();
    for (const auto& tr : t.trails) amounts.push_back(tr.amount);
    tags.push_back({t.ts, amounts});
  }
  j["tags"] = tags;

  json citizens = json::array();
  for (const auto& c : citizens_) {
    json trips = json::array();
    for (const auto& t : c.itinerary) trips.push_back({t.depart, t.building, t.parcel});
    citizens.push_back({{"trips", trips},
                        {"next", c.next_trip},
                        {"carried", c.carried.ml},
                        {"pos", pos_json(c.pos)},
                        {"path", c.path},
                        {"step", c.path_step},
                        {"travelling", c.travelling}});
  }
  j["citizens"] = citizens;

  json robots = json::array();
  for (const auto& r : robots_) {
    json jr = {{"state", static_cast<int>(r.state)},
               {"pos", pos_json(r.pos)},
               {"needs_decision", r.needs_decision},
               {"came_from", r.came_from ? json(*r.came_from) : json(nullptr)},
               {"range", r.range},
               {"last_max", r.last_max},
               {"recharge_pending", r.recharge_pending},
               {"episode_start", r.episode_start}};
    jr["cargo"] = r.cargo ? json{r.cargo->volume.ml, r.cargo->waste_found} : json(nullptr);
    robots.push_back(jr);
  }
  j["robots"] = robots;

  if (truck_) {
    json log = json::array();
    for (const auto& [b, t] : truck_->service_log) log.push_back({b, t});
    j["truck"] = {{"route", truck_->route}, {"next", truck_->next}, {"day", truck_->day}, {"log", log}};
  }
  return j.dump();
}

Simulation Simulation::restore(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SnapshotError(std::string("corrupt snapshot: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kSnapshotFormat) throw SnapshotError("not a simulation snapshot");
  if (j.value("version", -1) != kSnapshotVersion)
    throw SnapshotError("unsupported snapshot version " + j.value("version", json(nullptr)).dump());

  try {
    Simulation sim;
    sim.config_ = config_from_json(j.at("config")).normalized();
    sim.scenario_ = std::make_shared<const Scenario>(parse_scenario(j.at("scenario").dump()));
    for (const auto& d : j.at("deposits")) sim.deposits_.push_back({d.at(0).get<std::int64_t>(), d.at(1).get<NodeIndex>()});
    sim.build_derived();
    sim.clock_ = j.at("clock");
    sim.total_ticks_ = std::llround(sim.config_.days * kSecondsPerDay / sim.config_.tick_seconds);
    sim.rng_.set_state(j.at("rng").get<std::string>());
    sim.ledger_ = ledger_from(j.at("ledger"));
    sim.uncollected_ml_sum_ = j.at("accumulators").at(0);
    sim.full_bins_sum_ = j.at("accumulators").at(1);
    sim.max_episode_ = j.at("accumulators").at(2);

    const Scenario& s = *sim.scenario_;
    TrashBin blank_bin;
    blank_bin.capacity = Volume::from_liters(sim.config_.bin_capacity_liters);
    blank_bin.unit = Volume::from_liters(sim.config_.unit_liters);
    const auto& bins = j.at("bins");
    if (bins.size() != s.bins.size()) throw SnapshotError("bin count does not match scenario");
    for (const auto& b : bins) {
      TrashBin tb = blank_bin;
      tb.loose.ml = b.at(0);
      tb.packed_units = b.at(1);
      sim.bins_.push_back(tb);
    }

    const auto& tags = j.at("tags");
    if (sim.config_.mode != Mode::Truck && tags.size() != s.graph.node_count())
      throw SnapshotError("tag count does not match scenario");
    for (NodeIndex v = 0; v < tags.size(); ++v) {
      CrossroadTag t = CrossroadTag::blank(s.graph, v, sim.routing_[v]);
      t.ts = tags[v].at(0);
      const auto& amounts = tags[v].at(1);
      if (amounts.size() != t.trails.size()) throw SnapshotError("tag trail count does not match scenario");
      for (std::size_t k = 0; k < amounts.size(); ++k) t.trails[k].amount = amounts[k];
      sim.tags_.push_back(std::move(t));
    }

    for (const auto& jc : j.at("citizens")) {
      Citizen c;
      c.id = sim.citizens_.size();
      for (const auto& t : jc.at("trips")) c.itinerary.push_back({t.at(0), t.at(1), t.at(2)});
      c.next_trip = jc.at("next");
      c.carried.ml = jc.at("carried");
      c.pos = pos_from(jc.at("pos"));
      c.path = jc.at("path").get<std::vector<EdgeIndex>>();
      c.path_step = jc.at("step");
      c.travelling = jc.at("travelling");
      sim.citizens_.push_back(std::move(c));
    }

    for (const auto& jr : j.at("robots")) {
      Robot r;
      r.id = sim.robots_.size();
      r.state = static_cast<RobotState>(jr.at("state").get<int>());
      r.pos = pos_from(jr.at("pos"));
      r.needs_decision = jr.at("needs_decision");
      if (!jr.at("came_from").is_null()) r.came_from = jr.at("came_from").get<EdgeIndex>();
      r.range = jr.at("range");
      r.last_max = jr.at("last_max");
      r.recharge_pending = jr.at("recharge_pending");
      r.episode_start = jr.at("episode_start");
      if (!jr.at("cargo").is_null()) r.cargo = Cargo{Volume{jr.at("cargo").at(0).get<std::int64_t>()}, jr.at("cargo").at(1).get<double>()};
      sim.robots_.push_back(r);
    }

    if (j.contains("truck")) {
      const auto& jt = j.at("truck");
      Truck t;
      t.route = jt.at("route").get<std::vector<std::size_t>>();
      t.bins_per_hour = sim.config_.truck_bins_per_hour;
      t.window_start = sim.config_.truck_start_min * 60.0;
      t.window_end = sim.config_.truck_end_min * 60.0;
      t.next = jt.at("next");
      t.day = jt.at("day");
      for (const auto& e : jt.at("log")) t.service_log.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<double>());
      sim.truck_ = std::move(t);
    }
    return sim;
  } catch (const json::exception& e) {
    throw SnapshotError(std::string("corrupt snapshot: ") + e.what());
  } catch (const ScenarioError& e) {
    throw SnapshotError(std::string("corrupt snapshot scenario: ") + e.what());
  } catch (const ConfigError& e) {
    throw SnapshotError(std::string("corrupt snapshot config: ") + e.what());
  }
}

}  // namespace urbanswarm

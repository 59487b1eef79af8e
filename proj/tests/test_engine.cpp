#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "urbanswarm/engine.hpp"

using namespace urbanswarm;
using support::desk_config;
using support::desk_scenario;

namespace {

constexpr std::int64_t kTicksPerHour = 720;

std::string config_error(const nlohmann::json& j) {
  try {
    config_from_json(j).normalized();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

Volume accounted(const Simulation& s) {
  return s.waste_in_bins() + s.waste_on_robots() + s.waste_with_citizens() + s.ledger().delivered +
         s.ledger().truck_collected;
}

}  // namespace

TEST_CASE("initial state") {
  const RunConfig c = desk_config(Mode::MPF, 3);
  Simulation a(c, desk_scenario());
  CHECK(a.deposits().size() == 3);
  CHECK(a.routing().size() == desk_scenario()->graph.node_count());
  for (const auto& t : a.tags()) {
    CHECK(t.ts == 0.0);
    CHECK(max_pheromone(t) == 0.0);
  }
  CHECK(a.robots().size() == 10);
  for (const auto& r : a.robots()) {
    CHECK(a.routing().is_deposit(r.pos.node));
    CHECK(r.range == c.robot_range_m);
  }
  for (const auto& b : a.bins()) CHECK(b.stored().ml == 0);
  Simulation b(c, desk_scenario());
  CHECK(a.snapshot() == b.snapshot());

  Simulation t(desk_config(Mode::Truck, 3), desk_scenario());
  CHECK(t.robots().empty());
  REQUIRE(t.truck().has_value());
  CHECK(t.truck()->route.size() == desk_scenario()->bins.size());
}

TEST_CASE("mode constraints") {
  RunConfig c = desk_config(Mode::CPF, 1);
  CHECK(c.deposits == 1);
  Simulation s(c, desk_scenario());
  CHECK(s.deposits().size() == 1);
  RunConfig t;
  t.mode = Mode::Truck;
  CHECK(t.normalized().robots == 0);
}

TEST_CASE("config validation names the key") {
  CHECK(config_error({{"evaporation_rate", 1.5}}).find("0 <= E_r <= 1") != std::string::npos);
  CHECK(config_error({{"exploitation_rate", 0.0}}).find("exploitation_rate") != std::string::npos);
  CHECK(config_error({{"robots", "many"}}).find("robots") != std::string::npos);
  CHECK(config_error({{"robot_count", 3}}).find("robot_count") != std::string::npos);
  CHECK(config_error({{"mode", "swarm"}}).find("mode") != std::string::npos);
  CHECK(config_error({{"safety_factor", 0.9}}).find("safety_factor") != std::string::npos);
  CHECK(config_error({{"mode", "cpf"}, {"deposits", 4}}).empty());

  RunConfig big = desk_config(Mode::MPF, 1);
  big.deposits = 500;
  CHECK_THROWS_AS(Simulation(big, desk_scenario()), ConfigError);
}

TEST_CASE("config JSON round trip and overrides") {
  RunConfig c = desk_config(Mode::CPF, 99);
  c.exploitation_rate = 0.75;
  c.robot_start = RobotStart::Random;
  CHECK(config_from_json(to_json(c)) == c);

  nlohmann::json flat = nlohmann::json::object();
  apply_override(flat, "robots=20");
  apply_override(flat, "mode=truck");
  apply_override(flat, "evaporation_rate=0.05");
  apply_override(flat, "avoid_backtrack=false");
  const RunConfig o = config_from_json(flat);
  CHECK(o.robots == 20);
  CHECK(o.mode == Mode::Truck);
  CHECK(o.evaporation_rate == 0.05);
  CHECK_FALSE(o.avoid_backtrack);
  CHECK_THROWS_AS(apply_override(flat, "novalue"), ConfigError);
  for (const auto& key : config_keys()) CHECK(to_json(RunConfig{}).contains(key));
}

TEST_CASE("empty worlds stay at zero") {
  RunConfig c = desk_config(Mode::MPF, 1);
  c.citizens = 0;
  SUBCASE("no robots") { c.robots = 0; }
  SUBCASE("with robots") {}
  const DayMetrics m = run_day(c, desk_scenario());
  CHECK(m.aut == 0.0);
  CHECK(m.ftb == 0.0);
  CHECK(m.ticks == 17280);
}

TEST_CASE("one citizen, one bin") {
  auto s = std::make_shared<const Scenario>(generate_grid(2, 2, 100, 1, 3, 1));
  RunConfig c;
  c.citizens = 1;
  c.robots = 0;
  c.deposits = 1;
  Simulation sim(c, s);
  sim.enable_trace(true);
  sim.run_to_end();
  const auto& tr = sim.trace();
  const DayMetrics m = sim.metrics();
  REQUIRE(m.ledger.generated == Volume::from_liters(8.42));
  double sum = 0;
  bool seen = false;
  for (const auto& row : tr) {
    CHECK((row.uncollected_liters == 0.0 || row.uncollected_liters == 8.42));
    seen = seen || row.uncollected_liters == 8.42;
    sum += row.uncollected_liters;
  }
  CHECK(seen == (m.ledger.drops == 1));
  CHECK(m.aut == doctest::Approx(sum / (17280.0 * 125.0)).epsilon(1e-12));
}

TEST_CASE("time average of a scripted occupancy trace") {
  RunConfig c = desk_config(Mode::MPF, 1);
  c.citizens = 0;
  c.robots = 0;
  c.check_invariants = false;
  Simulation sim(c, desk_scenario());
  const auto n_bins = static_cast<double>(sim.bins().size());
  for (std::int64_t t = 0; t < 17280; ++t) {
    auto& bins = sim.bins();
    bins[0].loose = Volume::from_liters(t >= 1000 && t < 5000 ? 10.0 : 0.0);
    bins[1].loose = Volume::from_liters(t >= 8000 ? 125.0 : 0.0);
    bins[2].loose = Volume::from_liters(t % 2 == 0 ? 117.0 : 116.58);
    sim.tick();
  }
  const DayMetrics m = sim.metrics();
  const double aut = (10.0 * 4000 + 125.0 * 9280 + 8640 * (117.0 + 116.58)) / (17280 * n_bins * 125.0);
  const double ftb = (9280.0 + 8640.0) / (17280 * n_bins);  // 117 L leaves 8 L < 8.42 L
  CHECK(std::abs(m.aut - aut) <= 1e-12 * aut);
  CHECK(std::abs(m.ftb - ftb) <= 1e-12 * ftb);
}

TEST_CASE("conservation through the busy morning") {
  Simulation sim(desk_config(Mode::MPF, 5), desk_scenario());
  sim.run(7 * kTicksPerHour);
  for (int i = 0; i < 1000; ++i) {
    sim.tick();
    REQUIRE(accounted(sim) == sim.ledger().generated);
  }
  CHECK(sim.ledger().generated.ml > 0);
  CHECK(sim.ledger().pickups > 0);
}

TEST_CASE("truck conservation and positive AUT") {
  Simulation sim(desk_config(Mode::Truck, 2), desk_scenario());
  while (!sim.finished()) {
    sim.tick();
    REQUIRE(accounted(sim) == sim.ledger().generated);
  }
  CHECK(sim.metrics().aut > 0);
  CHECK(sim.ledger().bins_emptied == static_cast<std::int64_t>(desk_scenario()->bins.size()));
}

TEST_CASE("metric bounds") {
  for (Mode mode : {Mode::MPF, Mode::CPF, Mode::Truck}) {
    const DayMetrics m = run_day(desk_config(mode, 4), desk_scenario());
    CHECK(m.aut >= 0);
    CHECK(m.aut <= 1);
    CHECK(m.ftb >= 0);
    CHECK(m.ftb <= 1);
  }
}

TEST_CASE("determinism") {
  const RunConfig c = desk_config(Mode::MPF, 8);
  Simulation a(c, desk_scenario()), b(c, desk_scenario());
  a.run_to_end();
  b.run_to_end();
  CHECK(a.metrics() == b.metrics());
  CHECK(to_json(a.metrics()).dump() == to_json(b.metrics()).dump());
  CHECK(a.snapshot() == b.snapshot());
}

TEST_CASE("snapshot round trip") {
  const RunConfig c = desk_config(Mode::MPF, 6);
  SUBCASE("from tick 0") {
    Simulation direct(c, desk_scenario());
    Simulation restored = Simulation::restore(direct.snapshot());
    direct.run(100);
    restored.run(100);
    CHECK(direct.snapshot() == restored.snapshot());
  }
  SUBCASE("mid-day") {
    Simulation direct(c, desk_scenario());
    direct.run(8 * kTicksPerHour);
    Simulation restored = Simulation::restore(direct.snapshot());
    direct.run_to_end();
    restored.run_to_end();
    CHECK(direct.metrics() == restored.metrics());
    CHECK(direct.snapshot() == restored.snapshot());
  }
  SUBCASE("damaged input") {
    Simulation sim(c, desk_scenario());
    sim.run(10);
    const std::string bytes = sim.snapshot();
    CHECK_THROWS_AS(Simulation::restore(bytes.substr(0, bytes.size() / 2)), SnapshotError);
    CHECK_THROWS_AS(Simulation::restore("{}"), SnapshotError);
    auto j = nlohmann::json::parse(bytes);
    j["version"] = 99;
    CHECK_THROWS_AS(Simulation::restore(j.dump()), SnapshotError);
  }
}

TEST_CASE("trace export") {
  RunConfig c = desk_config(Mode::MPF, 1);
  c.days = 1;
  Simulation sim(c, desk_scenario());
  sim.enable_trace(true);
  sim.run(3);
  const std::string csv = trace_csv(sim.trace());
  CHECK(csv.rfind("tick,uncollected_liters,full_bins,robots_wander,robots_carry,robots_recharge,delivered_liters\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("multi-day runs keep generating waste") {
  RunConfig c = desk_config(Mode::Truck, 1);
  c.days = 2;
  const DayMetrics m = run_day(c, desk_scenario());
  CHECK(m.ticks == 2 * 17280);
  // a citizen still holding yesterday's parcel does not produce another
  CHECK(m.ledger.generated > 1000 * Volume::from_liters(8.42));
  CHECK(m.ledger.generated <= 2000 * Volume::from_liters(8.42));
  CHECK(m.ledger.bins_emptied == 2 * static_cast<std::int64_t>(desk_scenario()->bins.size()));
}

// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance N [M ...]  run only the listed criteria

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "support.hpp"
#include "trail_cases.hpp"
#include "urbanswarm/experiments.hpp"

using namespace urbanswarm;
using support::desk_config;
using support::desk_scenario;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;  // runtime budget
  std::function<Verdict()> run;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

Verdict trail_table() {
  int bad = 0;
  std::string first;
  for (const auto& c : support::trail_cases()) {
    CrossroadTag tag =
        support::make_tag(c.arrival ? std::vector<double>{c.p_ts, 0.0} : std::vector<double>{0.0, c.p_ts}, c.ts);
    ArrivalContext ctx;
    ctx.arrival_edge = 0;
    ctx.now = c.now;
    ctx.carrying = c.carrying;
    ctx.waste_found = c.waste_found;
    ctx.last_max = c.last_max;
    update_tag(tag, ctx, PheromoneParams(c.evaporation, c.exploitation, c.per_liter));
    const double got = tag.amount(c.arrival ? 0 : 1);
    if (!support::within_ulps(got, c.expected)) {
      if (bad++ == 0) first = std::string(c.name) + ": got " + format_double(got);
    }
  }
  const auto n = support::trail_cases().size();
  return {bad == 0 && n >= 20,
          std::to_string(n - static_cast<std::size_t>(bad)) + "/" + std::to_string(n) + " cases within 1 ulp" +
              (bad ? "; first miss " + first : "")};
}

Verdict routing_oracle() {
  int scenarios = 0, mismatches = 0, bad_walks = 0;
  std::size_t max_nodes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = support::random_scenario(1000 + seed, 40, 400);
    max_nodes = std::max(max_nodes, s.graph.node_count());
    const DepositSet deps = support::random_deposits(s, seed, 1 + (seed - 1) % 5);
    const RoutingTable rt = build_routing(s, deps);
    std::vector<std::vector<double>> d;
    for (const auto& dep : deps) d.push_back(support::oracle_distances(s.graph, dep.crossroad));
    for (NodeIndex v = 0; v < s.graph.node_count(); ++v) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& row : d) best = std::min(best, row[v]);
      if (rt[v].distance != best) ++mismatches;
      NodeIndex at = v;
      std::size_t steps = 0;
      bool ok = true;
      while (!rt.is_deposit(at) && ok) {
        const EdgeIndex e = rt[at].next_hop;
        if (e == kNone || ++steps > s.graph.node_count()) {
          ok = false;
          break;
        }
        const NodeIndex next = s.graph.edge(e).other(at);
        ok = rt[next].distance < rt[at].distance;
        at = next;
      }
      if (!ok) ++bad_walks;
    }
    ++scenarios;
  }
  return {mismatches == 0 && bad_walks == 0,
          std::to_string(scenarios) + " scenarios up to " + std::to_string(max_nodes) + " nodes, " +
              std::to_string(mismatches) + " distance mismatches, " + std::to_string(bad_walks) + " bad walks"};
}

Verdict conservation() {
  std::int64_t ticks = 0, violations = 0;
  std::string error;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    try {
      Simulation sim(desk_config(Mode::MPF, seed), desk_scenario());
      while (!sim.finished()) {
        sim.tick();
        ++ticks;
        const Volume accounted = sim.waste_in_bins() + sim.waste_on_robots() + sim.waste_with_citizens() +
                                 sim.ledger().delivered + sim.ledger().truck_collected;
        if (accounted != sim.ledger().generated) ++violations;
      }
    } catch (const std::exception& e) {
      if (error.empty()) error = e.what();
    }
  }
  return {violations == 0 && error.empty() && ticks == 10 * 17280,
          std::to_string(ticks) + " ticks over 10 seeds, " + std::to_string(violations) + " violations" +
              (error.empty() ? "" : "; error: " + error)};
}

Verdict determinism() {
  const RunConfig c = desk_config(Mode::MPF, 21);
  auto metric_file = [&] {
    Simulation sim(c, desk_scenario());
    sim.enable_trace(true);
    sim.run_to_end();
    return to_json(sim.metrics()).dump(2) + "\n" + trace_csv(sim.trace());
  };
  const bool runs_equal = metric_file() == metric_file();

  SweepSpec s;
  s.robots = {5, 10};
  s.evaporation_rate = {0.15};
  s.exploitation_rate = {0.6};
  s.unit_liters = {6, 18};
  s.deposits = {1, 3};
  s.replications = 2;
  s.base_seed = 4;
  s.base = desk_config(Mode::MPF, 1);
  s.scenario = desk_scenario();
  s.parallelism = 1;
  const std::string serial = sweep_csv(run_sweep(s));
  s.parallelism = 8;
  const std::string parallel = sweep_csv(run_sweep(s));
  return {runs_equal && serial == parallel, std::string("repeated run files ") + (runs_equal ? "identical" : "DIFFER") +
                                                "; 16-run sweep CSV at 1 vs 8 threads " +
                                                (serial == parallel ? "identical" : "DIFFER")};
}

Verdict baselines() {
  const RunConfig c = desk_config(Mode::MPF, 1);
  const CompareReport r = compare_baselines(desk_scenario(), c, c, c, 10, 1);
  const ModeStats& mpf = r.modes[0];
  const ModeStats& cpf = r.modes[1];
  const ModeStats& truck = r.modes[2];
  int aut_wins = 0, ftb_wins = 0;
  for (std::size_t i = 0; i < mpf.aut.size(); ++i) {
    aut_wins += mpf.aut[i] < truck.aut[i];
    ftb_wins += mpf.ftb[i] < truck.ftb[i];
  }
  const bool pass = mpf.aut_mean < truck.aut_mean && mpf.ftb_mean < truck.ftb_mean && aut_wins >= 8 &&
                    ftb_wins >= 8 && mpf.aut_mean <= cpf.aut_mean;
  return {pass, "AUT mpf " + fmt(mpf.aut_mean) + " cpf " + fmt(cpf.aut_mean) + " truck " + fmt(truck.aut_mean) +
                    "; FTB mpf " + fmt(mpf.ftb_mean) + " truck " + fmt(truck.ftb_mean) + "; MPF beats truck on " +
                    std::to_string(aut_wins) + "/10 (AUT), " + std::to_string(ftb_wins) + "/10 (FTB)"};
}

Verdict regression_signs() {
  int good_seeds = 0;
  std::string detail;
  for (std::uint64_t base : {1, 2, 3}) {
    SweepSpec s;
    s.robots = {5, 10, 15};
    s.unit_liters = {6, 12, 18};
    s.deposits = {1, 2, 3};
    s.evaporation_rate = {0.15};
    s.exploitation_rate = {0.6};
    s.replications = 5;
    s.base_seed = base;
    s.base = desk_config(Mode::MPF, 1);
    s.base.check_invariants = false;
    s.scenario = desk_scenario();
    const SweepResult r = run_sweep(s);
    const std::vector<std::string> preds = {"robots", "unit_liters", "deposits"};
    const auto aut = regress_sweep(r, preds, "aut");
    const auto ftb = regress_sweep(r, preds, "ftb");
    const bool signs = aut.beta[0] < 0 && aut.beta[1] < 0 && ftb.beta[0] < 0 && ftb.beta[1] < 0;
    const bool dn = std::abs(ftb.beta[2]) < std::abs(aut.beta[2]);
    good_seeds += signs && dn;
    detail += "\n    base seed " + std::to_string(base) + " (" + std::to_string(r.rows.size() - r.failures()) +
              " runs): AUT b=(" + fmt(aut.beta[0]) + ", " + fmt(aut.beta[1]) + ", " + fmt(aut.beta[2]) +
              ") FTB b=(" + fmt(ftb.beta[0]) + ", " + fmt(ftb.beta[1]) + ", " + fmt(ftb.beta[2]) + ") Rn/Cw signs " +
              (signs ? "ok" : "WRONG") + ", |b_Dn(FTB)| < |b_Dn(AUT)| " + (dn ? "ok" : "NO");
  }
  return {good_seeds >= 2, std::to_string(good_seeds) + "/3 base seeds meet every condition" + detail};
}

Verdict properties() {
  const std::pair<const char*, support::PropertyResult> results[] = {
      {"non-negativity", support::prop_non_negative(1000, 101)},
      {"evaporation monotonicity", support::prop_evaporation_monotone(1000, 102)},
      {"marking additivity", support::prop_marking_additive(1000, 103)},
      {"argmax scale invariance", support::prop_argmax_scale_invariant(1000, 104)},
      {"slot-limit arithmetic", support::prop_slot_limit(1000, 105)},
      {"full-bin boundary", support::prop_full_boundary(1000, 106)},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [name, r] : results) {
    pass = pass && r.passed() && r.cases >= 1000;
    if (!detail.empty()) detail += ", ";
    detail += std::string(name) + " " + std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases);
    if (!r.passed()) detail += " (" + r.first_failure + ")";
  }
  return {pass, detail};
}

Verdict truck_timing() {
  auto s = std::make_shared<const Scenario>(generate_grid(13, 13, 100, 274, 0, 1));
  RunConfig c;
  c.mode = Mode::Truck;
  c.citizens = 0;
  Simulation sim(c, s);
  sim.run(9 * 720);
  const auto& log = sim.truck()->service_log;
  if (log.size() != 274) return {false, "only " + std::to_string(log.size()) + " bins serviced"};
  const double minutes = (log.back().second - c.truck_start_min * 60) / 60.0;
  return {std::abs(minutes - 68.5) <= 0.25, "274 bins at 240/h, last serviced " + fmt(minutes, 2) +
                                                " min after window start (target 68.5 +- 0.25)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "trail update table", 1, trail_table},
      {2, "routing oracle equivalence", 30, routing_oracle},
      {3, "waste conservation", 300, conservation},
      {4, "determinism", 1e9, determinism},
      {5, "baseline ordering", 900, baselines},
      {6, "regression signs", 1800, regression_signs},
      {7, "property suites", 60, properties},
      {8, "truck timing", 10, truck_timing},
  };
  std::map<int, bool> wanted;
  for (int i = 1; i < argc; ++i) wanted[std::atoi(argv[i])] = true;

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("criterion %d %s: %s | %s | %.2fs%s\n", c.id, c.title, pass ? "PASS" : "FAIL", v.detail.c_str(), secs,
                in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

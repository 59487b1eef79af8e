#include "urbanswarm/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "urbanswarm/engine.hpp"
#include "urbanswarm/experiments.hpp"
#include "urbanswarm/scenario.hpp"

namespace urbanswarm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GridArgs {
  int rows = 20;
  int cols = 20;
  double edge = 100.0;
  int bins = 50;
  int buildings = 300;
  std::uint64_t seed = 1;

  json to_json() const {
    return {{"rows", rows}, {"cols", cols}, {"edge_m", edge}, {"bins", bins}, {"buildings", buildings}, {"seed", seed}};
  }
};

void add_grid_options(CLI::App* cmd, GridArgs& g, const std::string& prefix) {
  cmd->add_option("--" + prefix + "rows", g.rows, "Grid rows")->check(CLI::PositiveNumber);
  cmd->add_option("--" + prefix + "cols", g.cols, "Grid columns")->check(CLI::PositiveNumber);
  cmd->add_option("--" + prefix + "edge", g.edge, "Edge length in metres")->check(CLI::PositiveNumber);
  cmd->add_option("--" + prefix + "bins", g.bins, "Number of trash bins")->check(CLI::NonNegativeNumber);
  cmd->add_option("--" + prefix + "buildings", g.buildings, "Number of buildings")->check(CLI::NonNegativeNumber);
  cmd->add_option("--" + prefix + "seed", g.seed, "Generator seed");
}

struct Common {
  std::string out;
  std::string config;
  std::string scenario;
  std::vector<std::string> overrides;
  int verbose = 0;
  GridArgs grid;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(p.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw ConfigError(p.string() + ": cannot write");
}

fs::path output_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError(dir + ": output directory is not writable");
  return dir;
}

json load_flat(const Common& c) {
  json j = json::object();
  if (!c.config.empty()) {
    j = json::parse(read_file(c.config), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError(c.config + ": expected a flat JSON object");
  }
  for (const auto& o : c.overrides) apply_override(j, o);
  return j;
}

std::uint64_t fingerprint(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

struct LoadedScenario {
  std::shared_ptr<const Scenario> scenario;
  json source;
};

LoadedScenario load_or_generate(const Common& c) {
  LoadedScenario out;
  if (!c.scenario.empty()) {
    out.scenario = std::make_shared<const Scenario>(load_scenario(c.scenario));
    out.source = {{"file", c.scenario}};
  } else {
    out.scenario = std::make_shared<const Scenario>(
        generate_grid(c.grid.rows, c.grid.cols, c.grid.edge, c.grid.bins, c.grid.buildings, c.grid.seed));
    out.source = {{"grid", c.grid.to_json()}};
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fingerprint(to_json(*out.scenario))));
  out.source["fingerprint"] = hex;
  return out;
}

json provenance(const std::string& command, const std::vector<std::string>& argv, const json& config,
                const json& scenario) {
  return {{"artifact", "urbanswarm"}, {"version", kVersion}, {"subcommand", command},
          {"argv", argv},             {"config", config},    {"scenario", scenario}};
}

std::string csv_header(const json& prov) {
  std::string out;
  out += "urbanswarm " + std::string(kVersion) + "\n";
  out += "subcommand: " + prov["subcommand"].get<std::string>() + "\n";
  out += "config: " + prov["config"].dump() + "\n";
  out += "scenario: " + prov["scenario"].dump() + "\n";
  return out;
}

void note(const Common& c, const std::string& msg) {
  if (c.verbose > 0) std::cerr << msg << '\n';
}

void warn_flags(const RunConfig& cfg) {
  for (const auto& f : cfg.flags()) std::cerr << "note: " << f << '\n';
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Stigmergic waste-collection swarm simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> args(argv, argv + argc);

  auto add_common = [&](CLI::App* cmd, bool with_scenario) {
    cmd->add_option("-o,--out", common.out, std::string("Output directory (default $") + kOutputDirEnv + " or .)");
    cmd->add_flag("-v,--verbose", common.verbose, "More progress output");
    if (with_scenario) {
      cmd->add_option("-c,--config", common.config, "Flat JSON config file");
      cmd->add_option("--set", common.overrides, "Override a config key (key=value), repeatable");
      cmd->add_option("-s,--scenario", common.scenario, "Scenario JSON file; a grid is generated if omitted");
      add_grid_options(cmd, common.grid, "grid-");
    }
  };

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario", "Write a generated grid scenario");
  add_common(gen, false);
  GridArgs gen_grid;
  add_grid_options(gen, gen_grid, "");
  std::string gen_file = "scenario.json";
  gen->add_option("--file", gen_file, "Output file name inside the output directory");
  int gen_deposits = 0;
  gen->add_option("--deposits", gen_deposits, "Also place this many deposits by k-means")->check(CLI::NonNegativeNumber);

  // run
  auto* run = app.add_subcommand("run", "Simulate one configuration");
  add_common(run, true);
  bool trace = false;
  run->add_flag("--trace", trace, "Also write the per-tick trace CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the parameter grid with replications");
  add_common(sweep, true);
  int sweep_par = 0;
  sweep->add_option("-j,--parallelism", sweep_par, "Worker threads (overrides config)")->check(CLI::PositiveNumber);

  // compare
  auto* compare = app.add_subcommand("compare", "Compare MPF, CPF and truck over paired seeds");
  add_common(compare, true);
  int cmp_reps = 10;
  std::uint64_t cmp_seed = 1;
  int cmp_par = 1;
  compare->add_option("--replications", cmp_reps, "Paired seeds")->check(CLI::PositiveNumber);
  compare->add_option("--base-seed", cmp_seed, "Base seed");
  compare->add_option("-j,--parallelism", cmp_par, "Worker threads")->check(CLI::PositiveNumber);

  // regress
  auto* regress = app.add_subcommand("regress", "Standardized regression over a sweep CSV");
  add_common(regress, false);
  std::string reg_input;
  regress->add_option("input", reg_input, "Sweep CSV")->required();
  std::vector<std::string> reg_predictors{"robots", "unit_liters", "deposits"};
  regress->add_option("--predictors", reg_predictors, "Predictor columns")->delimiter(',');
  bool reg_rates = false;
  regress->add_flag("--include-rates", reg_rates, "Add evaporation_rate and exploitation_rate as predictors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      Scenario s = generate_grid(gen_grid.rows, gen_grid.cols, gen_grid.edge, gen_grid.bins, gen_grid.buildings,
                                 gen_grid.seed);
      if (gen_deposits > 0) s.deposits = place_deposits(s, static_cast<std::size_t>(gen_deposits), gen_grid.seed);
      const fs::path path = output_dir(common) / gen_file;
      write_file(path, to_json(s));
      note(common, "wrote " + path.string());
      return kExitOk;
    }

    if (run->parsed()) {
      const RunConfig cfg = config_from_json(load_flat(common)).normalized();
      warn_flags(cfg);
      const auto sc = load_or_generate(common);
      const fs::path dir = output_dir(common);
      Simulation sim(cfg, sc.scenario);
      sim.enable_trace(trace);
      sim.run_to_end();
      json out = to_json(sim.metrics());
      out["provenance"] = provenance("run", args, to_json(cfg), sc.source);
      write_file(dir / "metrics.json", out.dump(2) + "\n");
      if (trace) {
        const json prov = provenance("run", args, to_json(cfg), sc.source);
        std::string text;
        std::istringstream hdr(csv_header(prov));
        for (std::string line; std::getline(hdr, line);) text += "# " + line + "\n";
        write_file(dir / "trace.csv", text + trace_csv(sim.trace()));
      }
      std::cout << "aut=" << format_double(sim.metrics().aut) << " ftb=" << format_double(sim.metrics().ftb) << '\n';
      return kExitOk;
    }

    if (sweep->parsed()) {
      SweepSpec spec = sweep_spec_from_json(load_flat(common));
      if (sweep_par > 0) spec.parallelism = sweep_par;
      const auto sc = load_or_generate(common);
      spec.scenario = sc.scenario;
      const fs::path dir = output_dir(common);
      note(common, "sweep: " + std::to_string(spec.cell_count() * static_cast<std::size_t>(spec.replications)) +
                       " runs on " + std::to_string(spec.parallelism) + " thread(s)");
      const SweepResult r = run_sweep(spec);
      json spec_json = to_json(spec);
      const json prov = provenance("sweep", args, spec_json, sc.source);
      write_file(dir / "sweep.csv", sweep_csv(r, csv_header(prov)));
      json summary = sweep_summary(r);
      summary["provenance"] = prov;
      write_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
      write_file(dir / "heatmap.csv", "# " + std::string("urbanswarm ") + kVersion + "\n" + heatmap_csv(r));
      std::cout << r.rows.size() << " runs, " << r.failures() << " failed\n";
      return r.failures() == 0 ? kExitOk : kExitRun;
    }

    if (compare->parsed()) {
      const json flat = load_flat(common);
      const RunConfig base = config_from_json(flat);
      RunConfig mpf = base, cpf = base, truck = base;
      mpf.mode = Mode::MPF;
      cpf.mode = Mode::CPF;
      truck.mode = Mode::Truck;
      const auto sc = load_or_generate(common);
      const fs::path dir = output_dir(common);
      const CompareReport rep = compare_baselines(sc.scenario, mpf, cpf, truck, cmp_reps, cmp_seed, cmp_par);
      json out = to_json(rep);
      json cfg = to_json(base);
      cfg["replications"] = cmp_reps;
      cfg["base_seed"] = cmp_seed;
      out["provenance"] = provenance("compare", args, cfg, sc.source);
      write_file(dir / "compare.json", out.dump(2) + "\n");
      for (const auto& m : rep.modes)
        std::cout << to_string(m.mode) << " aut=" << format_double(m.aut_mean) << "+-" << format_double(m.aut_sd)
                  << " ftb=" << format_double(m.ftb_mean) << "+-" << format_double(m.ftb_sd) << '\n';
      return kExitOk;
    }

    if (regress->parsed()) {
      if (reg_rates) {
        reg_predictors.push_back("evaporation_rate");
        reg_predictors.push_back("exploitation_rate");
      }
      const SweepResult r = parse_sweep_csv(read_file(reg_input));
      if (r.failures() > 0) std::cerr << "note: " << r.failures() << " failed runs excluded\n";
      const fs::path dir = output_dir(common);
      json out = json::object();
      out["responses"] = json::array();
      for (const char* response : {"aut", "ftb"}) {
        const auto rep = regress_sweep(r, reg_predictors, response);
        out["responses"].push_back(to_json(rep));
        std::cout << response;
        for (std::size_t k = 0; k < rep.beta.size(); ++k)
          std::cout << ' ' << rep.predictors[k] << '=' << format_double(rep.beta[k]);
        std::cout << " r2=" << format_double(rep.r_squared) << '\n';
      }
      out["excluded_failures"] = r.failures();
      out["provenance"] = provenance("regress", args, {{"input", reg_input}, {"predictors", reg_predictors}}, nullptr);
      write_file(dir / "regression.json", out.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRun;
  }
  return kExitUsage;
}

}  // namespace urbanswarm::cli

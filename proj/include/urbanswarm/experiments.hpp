#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanswarm/engine.hpp"

namespace urbanswarm {

/// The five swept parameters, in grid order (outermost first).
struct SweepPoint {
  int robots = 0;
  double evaporation_rate = 0.0;
  double exploitation_rate = 0.0;
  double unit_liters = 0.0;
  int deposits = 0;
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepSpec {
  std::vector<int> robots{20, 35, 50};
  std::vector<double> evaporation_rate{0.05, 0.15, 0.30};
  std::vector<double> exploitation_rate{0.6, 0.75, 0.9};
  std::vector<double> unit_liters{6, 12, 18};
  std::vector<int> deposits{2, 3, 5};
  int replications = 10;
  std::uint64_t base_seed = 1;
  int parallelism = 1;
  RunConfig base;  // every other run setting
  std::shared_ptr<const Scenario> scenario;

  std::size_t cell_count() const;
  SweepPoint cell(std::size_t index) const;
  /// Stable per-run seed, independent of execution order.
  std::uint64_t run_seed(std::size_t cell, int replication) const;
  RunConfig run_config(std::size_t cell, int replication) const;
};

struct SweepRow {
  SweepPoint point;
  std::size_t cell = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  double aut = 0.0;
  double ftb = 0.0;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

struct CellSummary {
  SweepPoint point;
  std::size_t runs = 0;
  double aut_mean = 0, aut_sd = 0, aut_min = 0, aut_max = 0;
  double ftb_mean = 0, ftb_sd = 0, ftb_min = 0, ftb_max = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (cell, replication)
  std::vector<CellSummary> cells() const;
  std::size_t failures() const;
};

/// Runs every (cell, replication) pair on `parallelism` worker threads.
SweepResult run_sweep(const SweepSpec& spec);

/// Parses a flat sweep config: run-config keys, where the five swept keys may
/// be arrays, plus replications / base_seed / parallelism.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);

std::string sweep_csv(const SweepResult& r, const std::string& provenance = {});
SweepResult parse_sweep_csv(std::string_view text);
nlohmann::json sweep_summary(const SweepResult& r);
/// Long-format heatmap table: one line per (R_n, C_w, D_n, X_r, E_r) cell mean.
std::string heatmap_csv(const SweepResult& r);

// --- regression --------------------------------------------------------------------

struct RegressionReport {
  std::vector<std::string> predictors;
  std::string response;
  std::vector<double> beta;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// OLS on z-scored predictor and response columns. Throws Error on
/// zero-variance columns, too few rows, or rank deficiency.
RegressionReport standardized_regression(const std::vector<std::vector<double>>& predictor_columns,
                                         const std::vector<double>& response,
                                         std::vector<std::string> predictor_names = {},
                                         std::string response_name = {});

/// Regresses AUT or FTB ("aut"/"ftb") on sweep parameters by name
/// ("robots", "evaporation_rate", "exploitation_rate", "unit_liters",
/// "deposits"). Failed rows are skipped.
RegressionReport regress_sweep(const SweepResult& r, const std::vector<std::string>& predictors,
                               const std::string& response);

nlohmann::json to_json(const RegressionReport& r);

// --- baseline comparison -------------------------------------------------------

struct ModeStats {
  Mode mode = Mode::MPF;
  std::vector<double> aut;  // per paired seed
  std::vector<double> ftb;
  double aut_mean = 0, aut_sd = 0, ftb_mean = 0, ftb_sd = 0;
};

struct PairedTest {
  std::string a, b, metric;
  int a_wins = 0;  // runs where a is strictly lower
  int b_wins = 0;
  int ties = 0;
  double p_value = 1.0;  // two-sided exact sign test
};

struct CompareReport {
  std::vector<std::uint64_t> seeds;
  std::vector<ModeStats> modes;  // mpf, cpf, truck
  std::vector<PairedTest> tests;
};

CompareReport compare_baselines(std::shared_ptr<const Scenario> scenario, const RunConfig& mpf, const RunConfig& cpf,
                                const RunConfig& truck, int replications, std::uint64_t base_seed,
                                int parallelism = 1);

nlohmann::json to_json(const CompareReport& r);

/// Two-sided exact binomial sign test on wins/losses (ties dropped).
double sign_test_p(int wins, int losses);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

}  // namespace urbanswarm

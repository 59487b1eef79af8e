#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "urbanswarm/agents.hpp"
#include "urbanswarm/scenario.hpp"
#include "urbanswarm/stigmergy.hpp"

namespace urbanswarm {

enum class Mode { MPF, CPF, Truck };
const char* to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

enum class RobotStart { Deposits, Random };

/// Everything that determines one simulation run.
struct RunConfig {
  Mode mode = Mode::MPF;
  int robots = 35;                 // R_n
  double evaporation_rate = 0.15;  // E_r, per minute
  double exploitation_rate = 0.6;  // X_r
  double unit_liters = 12.0;       // C_w
  int deposits = 3;                // D_n
  double waste_liters = 8.42;      // lambda, per citizen per day
  double drop_radius_m = 50.0;     // phi
  int citizens = 10000;
  double pheromone_per_liter = 1.0;  // P_a
  double citizen_speed = 80.0;       // m/min
  double robot_speed = 250.0;        // m/min
  double robot_range_m = 30000.0;
  double safety_factor = 1.1;
  double tick_seconds = 5.0;
  int days = 1;
  std::uint64_t seed = 1;
  std::uint64_t placement_seed = 1;  // k-means initialisation
  int kmeans_max_iters = 300;
  double bin_capacity_liters = 125.0;
  double truck_bins_per_hour = 240.0;
  double truck_start_min = 7 * 60.0;
  double truck_end_min = 12 * 60.0;
  bool avoid_backtrack = true;
  RobotStart robot_start = RobotStart::Deposits;
  bool check_invariants = true;

  /// Applies the mode constraints (CPF: one deposit, TRUCK: no robots) and
  /// range-checks every field. Throws ConfigError naming the offending key.
  RunConfig normalized() const;

  /// Human-readable notes for values outside the experimentally swept sets.
  std::vector<std::string> flags() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Reads known keys from a flat object, starting from `base`. Unknown keys are
/// a ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
/// Sets one key from its text form ("robots=20").
void apply_override(nlohmann::json& flat, std::string_view assignment);
const std::vector<std::string>& config_keys();

struct TraceRow {
  std::int64_t tick = 0;
  double uncollected_liters = 0.0;
  std::int64_t full_bins = 0;
  std::array<std::int64_t, 3> robots_in_state{};  // wander, carry, recharge
  double delivered_liters = 0.0;
};

struct DayMetrics {
  double aut = 0.0;  // time-averaged uncollected liters / total bin capacity
  double ftb = 0.0;  // time-averaged full bins / bin count
  std::int64_t ticks = 0;
  WasteLedger ledger;
  double max_episode_seconds = 0.0;  // longest Carry or Recharge excursion
  std::vector<TraceRow> trace;

  friend bool operator==(const DayMetrics& l, const DayMetrics& r) {
    return l.aut == r.aut && l.ftb == r.ftb && l.ticks == r.ticks && l.ledger == r.ledger &&
           l.max_episode_seconds == r.max_episode_seconds;
  }
};

nlohmann::json to_json(const DayMetrics& m);
std::string trace_csv(const std::vector<TraceRow>& rows);

/// One deterministic simulation run.
class Simulation {
 public:
  Simulation(const RunConfig& config, std::shared_ptr<const Scenario> scenario);

  void tick();
  void run(std::int64_t ticks);
  void run_to_end();
  bool finished() const { return clock_ >= total_ticks_; }

  std::int64_t clock() const { return clock_; }
  double now_seconds() const { return static_cast<double>(clock_) * config_.tick_seconds; }
  std::int64_t total_ticks() const { return total_ticks_; }

  DayMetrics metrics() const;
  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<TraceRow>& trace() const { return trace_; }

  /// Throws InvariantError if waste is not conserved or any agent invariant
  /// is broken.
  void check_invariants() const;

  std::string snapshot() const;
  static Simulation restore(std::string_view bytes);

  const RunConfig& config() const { return config_; }
  const Scenario& scenario() const { return *scenario_; }
  const DepositSet& deposits() const { return deposits_; }
  const RoutingTable& routing() const { return routing_; }
  const std::vector<TrashBin>& bins() const { return bins_; }
  std::vector<TrashBin>& bins() { return bins_; }
  const std::vector<CrossroadTag>& tags() const { return tags_; }
  const std::vector<Citizen>& citizens() const { return citizens_; }
  std::vector<Citizen>& citizens() { return citizens_; }
  const std::vector<Robot>& robots() const { return robots_; }
  const std::optional<Truck>& truck() const { return truck_; }
  const WasteLedger& ledger() const { return ledger_; }

  Volume waste_in_bins() const;
  Volume waste_on_robots() const;
  Volume waste_with_citizens() const;

 private:
  class Paths : public PathSource {
   public:
    explicit Paths(const RoadGraph* g) : graph_(g) {}
    std::vector<EdgeIndex> path(NodeIndex from, NodeIndex to) override;

   private:
    const RoadGraph* graph_;
    std::unordered_map<NodeIndex, std::vector<EdgeIndex>> trees_;
  };

  Simulation() = default;
  void build_derived();
  World world();

  RunConfig config_;
  std::shared_ptr<const Scenario> scenario_;
  DepositSet deposits_;
  RoutingTable routing_;
  std::unique_ptr<ProximityIndex> proximity_;
  std::unique_ptr<PheromoneParams> pheromone_;
  AgentParams agent_params_;
  std::unique_ptr<Paths> paths_;

  std::vector<CrossroadTag> tags_;
  std::vector<TrashBin> bins_;
  std::vector<Citizen> citizens_;
  std::vector<Robot> robots_;
  std::optional<Truck> truck_;
  Rng rng_;
  WasteLedger ledger_;

  std::int64_t clock_ = 0;
  std::int64_t total_ticks_ = 0;
  std::int64_t uncollected_ml_sum_ = 0;
  std::int64_t full_bins_sum_ = 0;
  double max_episode_ = 0.0;
  bool tracing_ = false;
  std::vector<TraceRow> trace_;
};

/// Runs the configured number of days and returns the time-averaged metrics.
DayMetrics run_day(const RunConfig& config, std::shared_ptr<const Scenario> scenario);

}  // namespace urbanswarm

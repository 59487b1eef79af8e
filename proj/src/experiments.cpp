#include "urbanswarm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace urbanswarm {

using nlohmann::json;

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// --- sweep ---------------------------------------------------------------------------

std::size_t SweepSpec::cell_count() const {
  return robots.size() * evaporation_rate.size() * exploitation_rate.size() * unit_liters.size() * deposits.size();
}

SweepPoint SweepSpec::cell(std::size_t index) const {
  SweepPoint p;
  p.deposits = deposits[index % deposits.size()];
  index /= deposits.size();
  p.unit_liters = unit_liters[index % unit_liters.size()];
  index /= unit_liters.size();
  p.exploitation_rate = exploitation_rate[index % exploitation_rate.size()];
  index /= exploitation_rate.size();
  p.evaporation_rate = evaporation_rate[index % evaporation_rate.size()];
  index /= evaporation_rate.size();
  p.robots = robots[index];
  return p;
}

std::uint64_t SweepSpec::run_seed(std::size_t cell, int replication) const {
  return mix64(mix64(base_seed ^ mix64(cell)) + static_cast<std::uint64_t>(replication));
}

RunConfig SweepSpec::run_config(std::size_t index, int replication) const {
  RunConfig c = base;
  const SweepPoint p = cell(index);
  c.robots = p.robots;
  c.evaporation_rate = p.evaporation_rate;
  c.exploitation_rate = p.exploitation_rate;
  c.unit_liters = p.unit_liters;
  c.deposits = p.deposits;
  c.seed = run_seed(index, replication);
  return c;
}

namespace {

/// Calls job(i) for i in [0, n) on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t n, int threads, Job job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.cell_count() == 0) throw ConfigError("sweep: every parameter list must be non-empty");
  if (spec.replications < 1) throw ConfigError("replications: must be >= 1");
  if (!spec.scenario) throw ConfigError("sweep: no scenario");
  const std::size_t reps = static_cast<std::size_t>(spec.replications);
  SweepResult out;
  out.rows.resize(spec.cell_count() * reps);
  parallel_for(out.rows.size(), spec.parallelism, [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.cell = i / reps;
    row.replication = static_cast<int>(i % reps);
    row.point = spec.cell(row.cell);
    row.seed = spec.run_seed(row.cell, row.replication);
    try {
      const DayMetrics m = run_day(spec.run_config(row.cell, row.replication), spec.scenario);
      row.aut = m.aut;
      row.ftb = m.ftb;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return out;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
}

std::vector<CellSummary> SweepResult::cells() const {
  std::map<std::size_t, std::vector<const SweepRow*>> by_cell;
  for (const auto& r : rows)
    if (r.ok()) by_cell[r.cell].push_back(&r);
  std::vector<CellSummary> out;
  for (const auto& [cell, rs] : by_cell) {
    CellSummary c;
    c.point = rs.front()->point;
    c.runs = rs.size();
    std::vector<double> a, f;
    for (const auto* r : rs) {
      a.push_back(r->aut);
      f.push_back(r->ftb);
    }
    c.aut_mean = mean(a);
    c.aut_sd = sample_sd(a);
    c.aut_min = *std::min_element(a.begin(), a.end());
    c.aut_max = *std::max_element(a.begin(), a.end());
    c.ftb_mean = mean(f);
    c.ftb_sd = sample_sd(f);
    c.ftb_min = *std::min_element(f.begin(), f.end());
    c.ftb_max = *std::max_element(f.begin(), f.end());
    out.push_back(c);
  }
  return out;
}

namespace {

template <class T>
std::vector<T> list_or_scalar(const json& v, const char* key) {
  std::vector<T> out;
  auto one = [&](const json& x) {
    json wrapped = json::object();
    wrapped[key] = x;
    RunConfig c = config_from_json(wrapped);
    if constexpr (std::is_same_v<T, int>)
      out.push_back(std::string(key) == "robots" ? c.robots : c.deposits);
    else
      out.push_back(std::string(key) == "evaporation_rate"    ? c.evaporation_rate
                    : std::string(key) == "exploitation_rate" ? c.exploitation_rate
                                                               : c.unit_liters);
  };
  if (v.is_array()) {
    for (const auto& x : v) one(x);
  } else {
    one(v);
  }
  if (out.empty()) throw ConfigError(std::string(key) + ": sweep list must be non-empty");
  return out;
}

}  // namespace

SweepSpec sweep_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep config: expected a flat object");
  SweepSpec spec;
  json run = json::object();
  for (const auto& [key, value] : j.items()) {
    if (key == "robots") spec.robots = list_or_scalar<int>(value, "robots");
    else if (key == "evaporation_rate") spec.evaporation_rate = list_or_scalar<double>(value, "evaporation_rate");
    else if (key == "exploitation_rate") spec.exploitation_rate = list_or_scalar<double>(value, "exploitation_rate");
    else if (key == "unit_liters") spec.unit_liters = list_or_scalar<double>(value, "unit_liters");
    else if (key == "deposits") spec.deposits = list_or_scalar<int>(value, "deposits");
    else if (key == "replications") {
      if (!value.is_number_integer() || value.get<int>() < 1) throw ConfigError("replications: must be an integer >= 1");
      spec.replications = value.get<int>();
    } else if (key == "base_seed") {
      if (!value.is_number_unsigned()) throw ConfigError("base_seed: expected a non-negative integer");
      spec.base_seed = value.get<std::uint64_t>();
    } else if (key == "parallelism") {
      if (!value.is_number_integer() || value.get<int>() < 1) throw ConfigError("parallelism: must be an integer >= 1");
      spec.parallelism = value.get<int>();
    } else {
      run[key] = value;
    }
  }
  spec.base = config_from_json(run);
  spec.base.normalized();
  // every swept value must be a valid setting on its own
  for (std::size_t i = 0; i < spec.cell_count(); ++i) spec.run_config(i, 0).normalized();
  return spec;
}

json to_json(const SweepSpec& spec) {
  json j = to_json(spec.base);
  j.erase("seed");
  j["robots"] = spec.robots;
  j["evaporation_rate"] = spec.evaporation_rate;
  j["exploitation_rate"] = spec.exploitation_rate;
  j["unit_liters"] = spec.unit_liters;
  j["deposits"] = spec.deposits;
  j["replications"] = spec.replications;
  j["base_seed"] = spec.base_seed;
  return j;
}

namespace {

constexpr const char* kSweepHeader =
    "cell,replication,robots,evaporation_rate,exploitation_rate,unit_liters,deposits,seed,aut,ftb,status";

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string sweep_csv(const SweepResult& r, const std::string& provenance) {
  std::string out;
  if (!provenance.empty()) {
    std::istringstream in(provenance);
    for (std::string line; std::getline(in, line);) out += "# " + line + "\n";
  }
  out += kSweepHeader;
  out += '\n';
  for (const auto& row : r.rows) {
    out += std::to_string(row.cell) + ',' + std::to_string(row.replication) + ',' + std::to_string(row.point.robots) +
           ',' + format_double(row.point.evaporation_rate) + ',' + format_double(row.point.exploitation_rate) + ',' +
           format_double(row.point.unit_liters) + ',' + std::to_string(row.point.deposits) + ',' +
           std::to_string(row.seed) + ',';
    if (row.ok())
      out += format_double(row.aut) + ',' + format_double(row.ftb) + ",ok\n";
    else
      out += ",," + csv_escape("error: " + row.error) + '\n';
  }
  return out;
}

SweepResult parse_sweep_csv(std::string_view text) {
  SweepResult r;
  std::istringstream in{std::string(text)};
  bool header = false;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kSweepHeader) throw ConfigError("sweep CSV line " + std::to_string(line_no) + ": unexpected header");
      header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw ConfigError("sweep CSV line " + std::to_string(line_no) + ": expected 11 fields");
    try {
      SweepRow row;
      row.cell = std::stoull(f[0]);
      row.replication = std::stoi(f[1]);
      row.point = {std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stoi(f[6])};
      row.seed = std::stoull(f[7]);
      if (f[10] == "ok") {
        row.aut = std::stod(f[8]);
        row.ftb = std::stod(f[9]);
      } else {
        row.error = f[10].rfind("error: ", 0) == 0 ? f[10].substr(7) : f[10];
        if (row.error.empty()) row.error = "failed";
      }
      r.rows.push_back(row);
    } catch (const std::logic_error&) {
      throw ConfigError("sweep CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  if (!header) throw ConfigError("sweep CSV: missing header");
  return r;
}

json sweep_summary(const SweepResult& r) {
  json cells = json::array();
  for (const auto& c : r.cells()) {
    cells.push_back({{"robots", c.point.robots},
                     {"evaporation_rate", c.point.evaporation_rate},
                     {"exploitation_rate", c.point.exploitation_rate},
                     {"unit_liters", c.point.unit_liters},
                     {"deposits", c.point.deposits},
                     {"runs", c.runs},
                     {"aut", {{"mean", c.aut_mean}, {"sd", c.aut_sd}, {"min", c.aut_min}, {"max", c.aut_max}}},
                     {"ftb", {{"mean", c.ftb_mean}, {"sd", c.ftb_sd}, {"min", c.ftb_min}, {"max", c.ftb_max}}}});
  }
  json failures = json::array();
  for (const auto& row : r.rows)
    if (!row.ok()) failures.push_back({{"cell", row.cell}, {"replication", row.replication}, {"error", row.error}});
  return {{"rows", r.rows.size()}, {"failures", failures}, {"cells", cells}};
}

std::string heatmap_csv(const SweepResult& r) {
  std::string out = "robots,unit_liters,deposits,exploitation_rate,evaporation_rate,aut_mean,ftb_mean,runs\n";
  auto cells = r.cells();
  std::sort(cells.begin(), cells.end(), [](const CellSummary& a, const CellSummary& b) {
    const auto& p = a.point;
    const auto& q = b.point;
    return std::tie(p.robots, p.unit_liters, p.deposits, p.exploitation_rate, p.evaporation_rate) <
           std::tie(q.robots, q.unit_liters, q.deposits, q.exploitation_rate, q.evaporation_rate);
  });
  for (const auto& c : cells)
    out += std::to_string(c.point.robots) + ',' + format_double(c.point.unit_liters) + ',' +
           std::to_string(c.point.deposits) + ',' + format_double(c.point.exploitation_rate) + ',' +
           format_double(c.point.evaporation_rate) + ',' + format_double(c.aut_mean) + ',' +
           format_double(c.ftb_mean) + ',' + std::to_string(c.runs) + '\n';
  return out;
}

// --- regression ---------------------------------------------------------------------

namespace {

std::vector<double> zscore(const std::vector<double>& v, const std::string& name) {
  const double m = mean(v);
  const double sd = sample_sd(v);
  if (!(sd > 0)) throw Error("regression: column '" + name + "' has zero variance");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / sd;
  return out;
}

}  // namespace

RegressionReport standardized_regression(const std::vector<std::vector<double>>& predictor_columns,
                                         const std::vector<double>& response, std::vector<std::string> names,
                                         std::string response_name) {
  const std::size_t p = predictor_columns.size();
  const std::size_t n = response.size();
  if (p == 0) throw Error("regression: no predictors");
  if (n < p + 2) throw Error("regression: need at least " + std::to_string(p + 2) + " rows, got " + std::to_string(n));
  if (names.empty())
    for (std::size_t k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
  if (response_name.empty()) response_name = "y";

  Eigen::MatrixXd X(n, p);
  for (std::size_t k = 0; k < p; ++k) {
    if (predictor_columns[k].size() != n) throw Error("regression: column '" + names[k] + "' has the wrong length");
    const auto z = zscore(predictor_columns[k], names[k]);
    for (std::size_t i = 0; i < n; ++i) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = z[i];
  }
  const auto zy = zscore(response, response_name);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(zy.data(), static_cast<Eigen::Index>(n));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(p)) throw Error("regression: predictors are rank deficient");
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;

  RegressionReport r;
  r.predictors = std::move(names);
  r.response = std::move(response_name);
  r.beta.assign(beta.data(), beta.data() + beta.size());
  r.r_squared = 1.0 - resid.squaredNorm() / y.squaredNorm();
  r.samples = n;
  return r;
}

RegressionReport regress_sweep(const SweepResult& r, const std::vector<std::string>& predictors,
                               const std::string& response) {
  auto pick = [](const SweepRow& row, const std::string& name) -> double {
    if (name == "robots") return row.point.robots;
    if (name == "evaporation_rate") return row.point.evaporation_rate;
    if (name == "exploitation_rate") return row.point.exploitation_rate;
    if (name == "unit_liters") return row.point.unit_liters;
    if (name == "deposits") return row.point.deposits;
    if (name == "aut") return row.aut;
    if (name == "ftb") return row.ftb;
    throw ConfigError("regression: unknown column '" + name + "'");
  };
  std::vector<std::vector<double>> cols(predictors.size());
  std::vector<double> y;
  for (const auto& row : r.rows) {
    if (!row.ok()) continue;
    for (std::size_t k = 0; k < predictors.size(); ++k) cols[k].push_back(pick(row, predictors[k]));
    y.push_back(pick(row, response));
  }
  return standardized_regression(cols, y, predictors, response);
}

json to_json(const RegressionReport& r) {
  json beta = json::object();
  for (std::size_t k = 0; k < r.predictors.size(); ++k) beta[r.predictors[k]] = r.beta[k];
  return {{"response", r.response}, {"beta", beta}, {"r_squared", r.r_squared}, {"samples", r.samples}};
}

// --- baseline comparison -------------------------------------------------------------

double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int k = std::min(wins, losses);
  // P(X <= k) for X ~ Binomial(n, 1/2), via log-gamma to stay finite for large n
  double tail = 0;
  for (int i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  return std::min(1.0, 2 * tail);
}

CompareReport compare_baselines(std::shared_ptr<const Scenario> scenario, const RunConfig& mpf, const RunConfig& cpf,
                                const RunConfig& truck, int replications, std::uint64_t base_seed, int parallelism) {
  if (replications < 1) throw ConfigError("replications: must be >= 1");
  RunConfig configs[3] = {mpf, cpf, truck};
  configs[0].mode = Mode::MPF;
  configs[1].mode = Mode::CPF;
  configs[2].mode = Mode::Truck;
  for (auto& c : configs) c = c.normalized();

  CompareReport rep;
  for (int i = 0; i < replications; ++i) rep.seeds.push_back(mix64(base_seed + static_cast<std::uint64_t>(i)));

  const auto n = static_cast<std::size_t>(replications);
  std::vector<DayMetrics> results(3 * n);
  std::vector<std::string> errors(3 * n);
  parallel_for(3 * n, parallelism, [&](std::size_t i) {
    RunConfig c = configs[i / n];
    c.seed = rep.seeds[i % n];
    try {
      results[i] = run_day(c, scenario);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw InvariantError("comparison run failed: " + e);

  for (std::size_t m = 0; m < 3; ++m) {
    ModeStats s;
    s.mode = configs[m].mode;
    for (std::size_t i = 0; i < n; ++i) {
      s.aut.push_back(results[m * n + i].aut);
      s.ftb.push_back(results[m * n + i].ftb);
    }
    s.aut_mean = mean(s.aut);
    s.aut_sd = sample_sd(s.aut);
    s.ftb_mean = mean(s.ftb);
    s.ftb_sd = sample_sd(s.ftb);
    rep.modes.push_back(std::move(s));
  }

  const std::pair<int, int> pairs[3] = {{0, 2}, {0, 1}, {1, 2}};
  for (auto [a, b] : pairs) {
    for (const char* metric : {"aut", "ftb"}) {
      const auto& va = std::string(metric) == "aut" ? rep.modes[a].aut : rep.modes[a].ftb;
      const auto& vb = std::string(metric) == "aut" ? rep.modes[b].aut : rep.modes[b].ftb;
      PairedTest t{to_string(rep.modes[a].mode), to_string(rep.modes[b].mode), metric};
      for (std::size_t i = 0; i < n; ++i) {
        if (va[i] < vb[i]) ++t.a_wins;
        else if (vb[i] < va[i]) ++t.b_wins;
        else ++t.ties;
      }
      t.p_value = sign_test_p(t.a_wins, t.b_wins);
      rep.tests.push_back(t);
    }
  }
  return rep;
}

json to_json(const CompareReport& r) {
  json modes = json::array();
  for (const auto& m : r.modes)
    modes.push_back({{"mode", to_string(m.mode)},
                     {"aut", {{"mean", m.aut_mean}, {"sd", m.aut_sd}, {"runs", m.aut}}},
                     {"ftb", {{"mean", m.ftb_mean}, {"sd", m.ftb_sd}, {"runs", m.ftb}}}});
  json tests = json::array();
  for (const auto& t : r.tests)
    tests.push_back({{"a", t.a},
                     {"b", t.b},
                     {"metric", t.metric},
                     {"a_lower", t.a_wins},
                     {"b_lower", t.b_wins},
                     {"ties", t.ties},
                     {"sign_test_p", t.p_value}});
  return {{"seeds", r.seeds}, {"modes", modes}, {"paired_sign_tests", tests}};
}

}  // namespace urbanswarm

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace urbanswarm {

inline constexpr const char* kVersion = "1.0.0";

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

/// Base class for every error this library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario file or a scenario that breaks a structural invariant.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// A run configuration that is out of range or incompatible with the scenario.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant violated during a simulation (stranding, lost waste, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Snapshot bytes that cannot be decoded.
class SnapshotError : public Error {
 public:
  using Error::Error;
};

/// Waste volume in integer milliliters. Every volume in the simulation is
/// kept in this unit so that conservation of waste holds exactly.
struct Volume {
  std::int64_t ml = 0;

  static Volume from_liters(double liters) {
    if (!std::isfinite(liters)) throw ConfigError("volume must be finite");
    return Volume{static_cast<std::int64_t>(std::llround(liters * 1000.0))};
  }
  double liters() const { return static_cast<double>(ml) / 1000.0; }

  friend constexpr Volume operator+(Volume a, Volume b) { return {a.ml + b.ml}; }
  friend constexpr Volume operator-(Volume a, Volume b) { return {a.ml - b.ml}; }
  friend constexpr Volume operator*(std::int64_t k, Volume v) { return {k * v.ml}; }
  constexpr Volume& operator+=(Volume o) {
    ml += o.ml;
    return *this;
  }
  constexpr Volume& operator-=(Volume o) {
    ml -= o.ml;
    return *this;
  }
  friend constexpr auto operator<=>(Volume, Volume) = default;
};

/// Seedable generator whose output sequence is identical on every platform:
/// mt19937_64 is fully specified by the standard, and the bounded/unit draws
/// below avoid the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::string state() const;
  void set_state(const std::string& s);

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent per-run seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace urbanswarm

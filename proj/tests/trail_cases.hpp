#pragma once

#include <vector>

namespace support {

/// One trail update worked out by hand. Times are minutes.
struct TrailCase {
  const char* name;
  double p_ts;         // trail before the update
  double evaporation;  // E_r
  double per_liter;    // P_a
  double ts, now;
  bool arrival;  // is the trail on the road the robot arrived by
  bool carrying;
  double waste_found;   // T_a
  double exploitation;  // X_r, diffusion is 1 - X_r
  double last_max;
  double expected;
};

// clang-format off
inline const std::vector<TrailCase>& trail_cases() {
  static const std::vector<TrailCase> cases = {
    {"worked example 10 - 1.5 + 12 + 4",      10,   0.15, 1,   0,   10,   true,  true,  12,   0.6,  10,   24.5},
    {"off-arrival road clamps to zero",        1,    0.3,  1,   0,   100,  false, false, 0,    0.6,  0,    0},
    {"zero stays zero",                        0,    0.15, 1,   0,   55,   true,  false, 0,    0.6,  0,    0},
    {"plain evaporation",                      5,    0.1,  1,   0,   10,   true,  false, 0,    1.0,  0,    4},
    {"evaporation plus diffusion",             5,    0.1,  1,   0,   10,   true,  false, 0,    0.5,  8,    8},
    {"P_a scales evaporation and marking",     2,    0.25, 2,   0,   3,    true,  true,  4,    0.75, 4,    9.5},
    {"fresh mark of one parcel",               0,    0.15, 1,   30,  30,   true,  true,  8.42, 1.0,  0,    8.42},
    {"off-arrival road only evaporates",       2,    0.25, 2,   0,   3,    false, true,  4,    0.75, 4,    0.5},
    {"no evaporation",                         7,    0,    1,   0,   1000, true,  false, 0,    1.0,  0,    7},
    {"evaporation exactly empties",            7,    1,    1,   0,   7,    true,  false, 0,    1.0,  0,    0},
    {"full rate, partial time",                7,    1,    1,   0,   6.5,  true,  false, 0,    1.0,  0,    0.5},
    {"clamp happens before marking",           1,    0.3,  1,   0,   100,  true,  true,  5,    1.0,  0,    5},
    {"clamp happens before diffusion",         1,    0.3,  1,   0,   100,  true,  false, 0,    0.6,  10,   4},
    {"half-unit pheromone per liter",          3,    0.2,  0.5, 0,   10,   true,  true,  6,    0.9,  20,   7},
    {"same instant marking",                   3.25, 0.15, 1,   12,  12,   true,  true,  0.75, 1.0,  0,    4},
    {"diffusion alone onto an empty road",     0,    0.15, 1,   0,   1,    true,  false, 0,    0.5,  2.5,  1.25},
    {"large trail and full bin",               1000, 0.05, 1,   0,   60,   true,  true,  125,  0.75, 400,  1222},
    {"small trail fully evaporated",           0.5,  0.05, 1,   0,   20,   true,  false, 0,    0.6,  0,    0},
    {"chained worked example",                 12,   0.15, 1,   10,  50,   true,  true,  17,   0.6,  24.5, 32.8},
    {"off-arrival road, strong trail",         30,   0.15, 1,   10,  50,   false, true,  17,   0.6,  24.5, 24},
    {"first mark on empty road",               0,    0.15, 1,   0,   3,    true,  true,  12,   0.9,  0,    12},
    {"half-minute elapsed",                    100,  0.3,  1,   0,   0.5,  true,  false, 0,    1.0,  0,    99.85},
    {"non-zero start time",                    10,   0.15, 1,   420, 425,  true,  false, 0,    1.0,  0,    9.25},
    {"not carrying ignores T_a",               6,    0.1,  1,   0,   10,   true,  false, 99,   1.0,  0,    5},
  };
  return cases;
}
// clang-format on

}  // namespace support

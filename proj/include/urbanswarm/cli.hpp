#pragma once

namespace urbanswarm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitRun = 4;

/// Default output directory when --out is not given.
inline constexpr const char* kOutputDirEnv = "URBANSWARM_OUTPUT_DIR";

/// Parses argv, runs the subcommand and writes its artifacts. Never throws.
int dispatch(int argc, char** argv);

}  // namespace urbanswarm::cli

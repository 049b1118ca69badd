#pragma once

#include <string>
#include <vector>

namespace qpspec::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CliOptions {
  std::string config_path;
  // Overrides the config's "output" entry when non-empty.
  std::string out_dir;
  // 0 keeps the OpenMP runtime default.
  int threads = 0;
  // Dotted key=value pairs applied onto the loaded config, for example
  // "discretization.h=0.01" or "problem.preset=reflected-generalized".
  std::vector<std::string> overrides;
};

// Loads and validates the config, runs the requested command, and writes the
// artifact files plus meta.json into the output directory. Returns one of the
// kExit* codes; failures are reported on stderr with the library error name.
int run_options(const CliOptions& options);

// Full front end: flag parsing on top of run_options.
int run_main(int argc, const char* const* argv);

}  // namespace qpspec::cli

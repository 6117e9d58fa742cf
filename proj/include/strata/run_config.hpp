#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "strata/metrics.hpp"

namespace strata {

/// One experiment parsed from a config section. Flat key = value lines with
/// JSON-compatible values; a file may hold several [section] runs.
struct RunConfig {
  std::string name = "run";
  std::string manifold;
  std::map<std::string, double> params;       // c, n, N, omega0, b
  std::vector<std::string> algorithms = {"cEP", "tMP", "cMP"};
  std::vector<double> dt_list;
  long long n_traj = 100000;
  double t_max = 5.0;
  std::uint64_t seed = 42;
  int midpoint_iters = 3;
  int normal_iters = 3;
  int output_points = 50;
  std::string reference = "auto";   // auto | oracle | intrinsic | fine-step
  double reference_traj_factor = 1.0;
  bool shared_streams = false;
  int workers = 0;
  std::string output_dir;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parse a config file into its run sections. Throws ConfigError with the
/// offending field (or "file"/"line N") on any syntax or type problem.
std::vector<RunConfig> parse_config_file(const std::string& path);

/// Parse from an in-memory string (used by tests).
std::vector<RunConfig> parse_config_text(const std::string& text,
                                         const std::string& origin = "<string>");

}  // namespace strata

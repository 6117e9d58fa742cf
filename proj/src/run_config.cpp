#include "strata/run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace strata {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

json parse_value(const std::string& field, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    // bare words (e.g. oracle) are treated as strings
    if (!text.empty() && text.find_first_of("[]{},") == std::string::npos) {
      return json(text);
    }
    throw ConfigError(field, "cannot parse value '" + text + "'");
  }
}

void apply(RunConfig& cfg, const std::string& key, const json& v) {
  auto need_number = [&](const char* f) -> double {
    if (!v.is_number()) throw ConfigError(f, "expected a number");
    return v.get<double>();
  };
  auto need_string = [&](const char* f) -> std::string {
    if (!v.is_string()) throw ConfigError(f, "expected a string");
    return v.get<std::string>();
  };
  if (key == "manifold") {
    cfg.manifold = need_string("manifold");
  } else if (key == "algorithms") {
    if (!v.is_array()) throw ConfigError("algorithms", "expected an array of names");
    cfg.algorithms.clear();
    for (const auto& a : v) {
      if (!a.is_string()) throw ConfigError("algorithms", "expected strings");
      cfg.algorithms.push_back(a.get<std::string>());
    }
  } else if (key == "dt_list" || key == "dt") {
    cfg.dt_list.clear();
    if (v.is_array()) {
      for (const auto& d : v) {
        if (!d.is_number()) throw ConfigError("dt_list", "expected numbers");
        cfg.dt_list.push_back(d.get<double>());
      }
    } else if (v.is_number()) {
      cfg.dt_list.push_back(v.get<double>());
    } else {
      throw ConfigError("dt_list", "expected a number or array");
    }
  } else if (key == "n_traj") {
    cfg.n_traj = static_cast<long long>(need_number("n_traj"));
  } else if (key == "t_max") {
    cfg.t_max = need_number("t_max");
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(need_number("seed"));
  } else if (key == "midpoint_iters") {
    cfg.midpoint_iters = static_cast<int>(need_number("midpoint_iters"));
  } else if (key == "normal_iters") {
    cfg.normal_iters = static_cast<int>(need_number("normal_iters"));
  } else if (key == "output_points") {
    cfg.output_points = static_cast<int>(need_number("output_points"));
  } else if (key == "reference") {
    cfg.reference = need_string("reference");
  } else if (key == "reference_traj_factor") {
    cfg.reference_traj_factor = need_number("reference_traj_factor");
  } else if (key == "shared_streams") {
    if (!v.is_boolean()) throw ConfigError("shared_streams", "expected true/false");
    cfg.shared_streams = v.get<bool>();
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(need_number("workers"));
  } else if (key == "output_dir") {
    cfg.output_dir = need_string("output_dir");
  } else {
    // manifold parameters (c, n, N, omega0, b, ...)
    if (!v.is_number()) throw ConfigError(key, "expected a numeric parameter value");
    cfg.params[key] = v.get<double>();
  }
}

}  // namespace

void RunConfig::validate() const {
  if (manifold.empty()) throw ConfigError("manifold", "missing manifold name");
  if (dt_list.empty()) throw ConfigError("dt_list", "at least one dt is required");
  for (double dt : dt_list) {
    if (!(dt > 0.0)) throw ConfigError("dt", "dt must be positive");
  }
  if (n_traj < 1) throw ConfigError("n_traj", "n_traj must be >= 1");
  if (!(t_max > 0.0)) throw ConfigError("t_max", "t_max must be positive");
  if (midpoint_iters < 1) throw ConfigError("midpoint_iters", "must be >= 1");
  if (normal_iters < 1) throw ConfigError("normal_iters", "must be >= 1");
  if (output_points < 1) throw ConfigError("output_points", "must be >= 1");
  if (algorithms.empty()) throw ConfigError("algorithms", "empty algorithm list");
  for (const auto& a : algorithms) algorithm_from_string(a);  // throws on junk
  reference_mode_from_string(reference);
  if (reference_traj_factor <= 0.0) {
    throw ConfigError("reference_traj_factor", "must be positive");
  }
  catalog(manifold, params);  // validates name and parameters
}

std::vector<RunConfig> parse_config_text(const std::string& text,
                                         const std::string& origin) {
  std::vector<RunConfig> runs;
  RunConfig current;
  bool seen_any_key = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno),
                          origin + ": unterminated section header");
      }
      if (seen_any_key) runs.push_back(current);
      current = RunConfig{};
      current.name = trim(line.substr(1, line.size() - 2));
      seen_any_key = true;  // a named empty section still counts as a run
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno),
                        origin + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno), origin + ": empty key");
    }
    apply(current, key, parse_value(key, value));
    seen_any_key = true;
  }
  if (seen_any_key) runs.push_back(current);
  if (runs.empty()) throw ConfigError("file", origin + ": no runs defined");
  for (auto& r : runs) {
    if (r.output_dir.empty()) r.output_dir = r.name;
    r.validate();
  }
  return runs;
}

std::vector<RunConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("file", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace strata

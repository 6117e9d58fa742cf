#include "strata/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace strata {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

json config_json(const RunConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["manifold"] = cfg.manifold;
  j["params"] = cfg.params;
  j["algorithms"] = cfg.algorithms;
  j["dt_list"] = cfg.dt_list;
  j["n_traj"] = cfg.n_traj;
  j["t_max"] = cfg.t_max;
  j["seed"] = cfg.seed;
  j["midpoint_iters"] = cfg.midpoint_iters;
  j["normal_iters"] = cfg.normal_iters;
  j["output_points"] = cfg.output_points;
  j["reference"] = cfg.reference;
  j["reference_traj_factor"] = cfg.reference_traj_factor;
  j["shared_streams"] = cfg.shared_streams;
  return j;
}

// Cache identity for simulated references: everything that shapes the series.
std::string reference_key(const RunConfig& cfg) {
  json j = config_json(cfg);
  j.erase("algorithms");  // the reference does not depend on the algorithm list
  j.erase("name");
  return j.dump();
}

ErrorTableOptions table_options(const RunConfig& cfg) {
  ErrorTableOptions opt;
  opt.midpoint_iters = cfg.midpoint_iters;
  opt.normal_iters = cfg.normal_iters;
  opt.shared_streams = cfg.shared_streams;
  opt.reference_traj_factor = cfg.reference_traj_factor;
  opt.ensemble.workers = cfg.workers;
  opt.ensemble.output_points = cfg.output_points;
  return opt;
}

void write_series_rows(std::ostream& os, const std::string& algorithm, double dt,
                       const std::string& observable,
                       const std::vector<double>& times,
                       const std::vector<double>& mean,
                       const std::vector<double>& sigma,
                       const std::vector<double>& constraint, bool reference) {
  for (size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]) << ',' << algorithm << ',' << format_double(dt)
       << ',' << observable << ',' << format_double(mean[i]) << ','
       << format_double(sigma[i]) << ','
       << format_double(constraint.empty() ? 0.0 : constraint[i]) << ','
       << (reference ? "true" : "false") << '\n';
  }
}

constexpr const char* kSeriesHeader =
    "time,algorithm,dt,observable,mean,sigma,constraint_err,reference";

void write_timeseries(const fs::path& path, const RunConfig& cfg,
                      const ErrorTableResult& data) {
  std::ofstream os(path, std::ios::binary);
  os << kSeriesHeader << '\n';
  for (size_t di = 0; di < data.dt_list.size(); ++di) {
    const double dt = data.dt_list[di];
    for (const auto& alg_name : cfg.algorithms) {
      const EnsembleResult& r = data.runs.at(alg_name)[di];
      std::vector<double> constraint(r.constraint_mean.begin(),
                                     r.constraint_mean.end());
      for (size_t oi = 0; oi < r.observable_names.size(); ++oi) {
        std::vector<double> mean(r.means.row(oi).begin(), r.means.row(oi).end());
        std::vector<double> sigma(r.sigmas.row(oi).begin(), r.sigmas.row(oi).end());
        write_series_rows(os, alg_name, dt, r.observable_names[oi], r.times, mean,
                          sigma, constraint, false);
      }
    }
  }
}

void write_reference_csv(const fs::path& path, const ErrorTableResult& data) {
  std::ofstream os(path, std::ios::binary);
  os << kSeriesHeader << '\n';
  for (const auto& [obs, refs] : data.references) {
    for (size_t di = 0; di < refs.size(); ++di) {
      const ReferenceSeries& ref = refs[di];
      write_series_rows(os, "reference(" + ref.kind + ")", data.dt_list[di], obs,
                        ref.times, ref.mean, ref.sigma, {}, true);
    }
  }
}

void write_error_table(const fs::path& path, const ErrorTable& table) {
  std::ofstream os(path, std::ios::binary);
  os << "manifold,observable,dt,algorithm,max_truncation_error,max_constraint_error\n";
  for (const auto& row : table.rows) {
    os << table.manifold << ',' << row.observable << ',' << format_double(row.dt)
       << ',' << row.algorithm << ',' << format_double(row.max_truncation) << ','
       << format_double(row.max_constraint) << '\n';
  }
}

void write_manifest(const fs::path& path, const RunConfig& cfg,
                    const std::vector<std::string>& observables,
                    long long rejections) {
  json j;
  j["config"] = config_json(cfg);
  j["observables"] = observables;
  j["version"] = kVersion;
  j["reference_key"] = reference_key(cfg);
  j["rejections"] = rejections;
  std::ofstream os(path, std::ios::binary);
  os << j.dump(2) << '\n';
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const CatalogEntry entry = catalog(cfg.manifold, cfg.params);
  std::vector<Algorithm> algs;
  for (const auto& a : cfg.algorithms) algs.push_back(algorithm_from_string(a));

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  ErrorTableResult data = build_error_table(
      entry, algs, cfg.dt_list, cfg.n_traj, cfg.t_max, cfg.seed,
      reference_mode_from_string(cfg.reference), table_options(cfg));

  ExperimentReport report;
  report.bundle_dir = dir.string();
  for (const auto& [name, runs] : data.runs) {
    for (const auto& r : runs) report.rejections += r.rejections;
  }

  std::vector<std::string> obs_names;
  for (const auto& o : entry.observables) obs_names.push_back(o.name);
  write_timeseries(dir / "timeseries.csv", cfg, data);
  write_reference_csv(dir / "reference.csv", data);
  write_error_table(dir / "error_table.csv", data.table);
  write_manifest(dir / "manifest.json", cfg, obs_names, report.rejections);
  return report;
}

ExperimentReport run_reference(const RunConfig& cfg) {
  cfg.validate();
  const CatalogEntry entry = catalog(cfg.manifold, cfg.params);
  const ReferenceMode mode = reference_mode_from_string(cfg.reference);
  if (mode == ReferenceMode::Intrinsic && !entry.intrinsic.has_value()) {
    throw ConfigError("reference",
                      "manifold '" + entry.name + "' has no intrinsic model");
  }
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  const fs::path ref_path = dir / "reference.csv";
  const fs::path manifest_path = dir / "manifest.json";
  const std::string key = reference_key(cfg);

  ExperimentReport report;
  report.bundle_dir = dir.string();

  // Cache: an existing reference written under the same key is reused.
  if (fs::exists(ref_path) && fs::exists(manifest_path)) {
    std::ifstream mi(manifest_path);
    try {
      json j;
      mi >> j;
      if (j.value("reference_key", "") == key) {
        report.reference_reused = true;
        return report;
      }
    } catch (const json::exception&) {
      // fall through and recompute
    }
  }

  ErrorTableResult data;
  data.dt_list = cfg.dt_list;
  const ErrorTableOptions opt = table_options(cfg);
  for (double dt : cfg.dt_list) {
    for (const auto& obs : entry.observables) {
      data.references[obs.name].push_back(compute_reference(
          entry, obs.name, dt, cfg.n_traj, cfg.t_max, cfg.seed, mode, opt));
    }
  }
  std::vector<std::string> obs_names;
  for (const auto& o : entry.observables) obs_names.push_back(o.name);
  write_reference_csv(ref_path, data);
  write_manifest(manifest_path, cfg, obs_names, 0);
  return report;
}

std::vector<std::string> emit_plot_data(const std::string& bundle_dir) {
  const fs::path dir(bundle_dir);
  const fs::path ts_path = dir / "timeseries.csv";
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(ts_path) || !fs::exists(manifest_path)) {
    throw ConfigError("bundle", "no completed report bundle at '" + bundle_dir + "'");
  }
  json manifest;
  {
    std::ifstream mi(manifest_path);
    mi >> manifest;
  }
  const std::string manifold = manifest["config"]["manifold"].get<std::string>();
  const auto algorithms =
      manifest["config"]["algorithms"].get<std::vector<std::string>>();
  std::vector<double> dt_list = manifest["config"]["dt_list"].get<std::vector<double>>();
  if (algorithms.empty()) return {};

  const double dt_fine = *std::min_element(dt_list.begin(), dt_list.end());

  // slurp the two series files
  struct Key {
    std::string alg, obs;
    bool operator<(const Key& o) const {
      return std::tie(alg, obs) < std::tie(o.alg, o.obs);
    }
  };
  std::map<Key, std::vector<std::array<double, 3>>> series;  // t, mean, sigma
  std::map<std::string, std::vector<std::array<double, 2>>> reference;  // obs -> t, mean

  auto slurp = [&](const fs::path& p, bool is_reference) {
    std::ifstream is(p);
    if (!is) return;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::vector<std::string> f;
      std::string tok;
      while (std::getline(ls, tok, ',')) f.push_back(tok);
      if (f.size() != 8) continue;
      if (std::stod(f[2]) != dt_fine) continue;
      if (is_reference) {
        reference[f[3]].push_back({std::stod(f[0]), std::stod(f[4])});
      } else {
        series[{f[1], f[3]}].push_back(
            {std::stod(f[0]), std::stod(f[4]), std::stod(f[5])});
      }
    }
  };
  slurp(ts_path, false);
  slurp(dir / "reference.csv", true);

  // the first catalog observable keeps the short figure name
  std::string primary_obs;
  if (manifest.contains("observables") && !manifest["observables"].empty()) {
    primary_obs = manifest["observables"][0].get<std::string>();
  } else if (!series.empty()) {
    primary_obs = series.begin()->first.obs;
  }

  std::vector<std::string> written;
  for (const auto& alg : algorithms) {
    for (const auto& [key, rows] : series) {
      if (key.alg != alg) continue;
      std::string alg_tag = alg;
      for (auto& ch : alg_tag) ch = static_cast<char>(std::tolower(ch));
      const std::string suffix = key.obs == primary_obs ? "" : "_" + key.obs;
      const fs::path out_path =
          dir / ("fig_" + manifold + "_" + alg_tag + suffix + ".csv");
      std::ofstream os(out_path, std::ios::binary);
      os << "time,mean,sigma_lo,sigma_hi,exact\n";
      const auto& ref = reference[key.obs];
      for (size_t i = 0; i < rows.size(); ++i) {
        const double exact = i < ref.size() ? ref[i][1] : rows[i][1];
        os << format_double(rows[i][0]) << ',' << format_double(rows[i][1]) << ','
           << format_double(rows[i][1] - rows[i][2]) << ','
           << format_double(rows[i][1] + rows[i][2]) << ',' << format_double(exact)
           << '\n';
      }
      written.push_back(out_path.string());
    }
  }
  return written;
}

}  // namespace strata

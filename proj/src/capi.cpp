// SPDX-License-Identifier: Apache-2.0

#include "kinlab.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "kinetic/harness.hpp"

using namespace kin;

struct kl_config {
  KeyValueConfig kv;
};

namespace {

thread_local std::string g_last_error;

kl_status fail(kl_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
kl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return KL_OK;
  } catch (const ConfigError& e) {
    return fail(KL_CONFIG_ERROR, e.what());
  } catch (const ContractError& e) {
    return fail(KL_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(KL_RUNTIME_ERROR, e.what());
  }
}

ExperimentConfig config_of(const kl_config* cfg) {
  if (!cfg) throw ConfigError("null configuration handle");
  return ExperimentConfig::from_kv(cfg->kv);
}

std::string member_log_path(const std::string& dir, std::uint64_t member) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "member_%04d.klev", int(member));
  return dir + "/" + buf;
}

// loads the ensemble recorded by a previous simulate stage
std::vector<EventLog> load_logs(const ExperimentConfig& config) {
  const RunManifest manifest =
      RunManifest::read(config.out_dir + "/manifest.txt");
  std::vector<EventLog> logs;
  for (std::uint64_t member : manifest.member_streams)
    logs.push_back(read_event_log(member_log_path(config.out_dir, member)));
  if (logs.empty()) throw RuntimeError("no event logs recorded in manifest");
  return logs;
}

std::string artifact(const std::string& dir, const std::string& stem,
                     std::size_t idx, const std::string& ext) {
  return dir + "/" + stem + "_t" + std::to_string(idx) + ext;
}

}  // namespace

extern "C" {

const char* kl_version(void) { return kVersionString; }

const char* kl_last_error(void) { return g_last_error.c_str(); }

const char* kl_config_keys(void) {
  static const std::string keys = config_keys();
  return keys.c_str();
}

kl_status kl_config_new(kl_config** out) {
  return guarded([&] {
    if (!out) throw ConfigError("null output handle");
    *out = new kl_config{};
  });
}

kl_status kl_config_load(const char* path, kl_config** out) {
  return guarded([&] {
    if (!out || !path) throw ConfigError("null path or output handle");
    auto kv = KeyValueConfig::parse_file(path);
    ExperimentConfig::from_kv(kv);  // validate eagerly
    *out = new kl_config{std::move(kv)};
  });
}

kl_status kl_config_set(kl_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) throw ConfigError("null argument");
    if (std::string(key).empty()) throw ConfigError("empty config key");
    cfg->kv.entries[key] = value;
  });
}

void kl_config_free(kl_config* cfg) { delete cfg; }

kl_status kl_run_simulate(const kl_config* cfg) {
  return guarded([&] { run_ensemble(config_of(cfg), /*persist_logs=*/true); });
}

kl_status kl_run_graphs(const kl_config* cfg) {
  return guarded([&] {
    const ExperimentConfig config = config_of(cfg);
    const std::vector<EventLog> logs = load_logs(config);
    const double w_short = std::min(config.windows.short_window, config.t_end);
    const double w_long = std::min(config.windows.long_window, config.t_end);

    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < logs.size(); ++m) {
      const ClusterStatsRow rs = cluster_stats_member(logs[m], 0.0, w_short);
      const ClusterStatsRow rl = cluster_stats_member(logs[m], 0.0, w_long);
      rows.push_back({double(m), double(logs[m].initial.size()),
                      double(logs[m].events.size()), rs.mean_size,
                      rs.cyclic_particle_fraction, rl.mean_size,
                      double(rl.max_size), rl.cyclic_particle_fraction,
                      rl.largest_component_fraction});
    }
    write_csv(config.out_dir + "/graphs.csv",
              {"member", "n_particles", "n_collisions",
               "mean_cluster_size_short", "cyclic_particle_fraction_short",
               "mean_cluster_size_long", "max_cluster_size_long",
               "cyclic_particle_fraction_long",
               "largest_component_fraction_long"},
              rows);

    std::vector<const EventLog*> ptrs;
    for (const auto& log : logs) ptrs.push_back(&log);
    const ClusterStats stats = cluster_stats(ptrs, 0.0, w_long);
    std::vector<std::vector<double>> size_rows;
    for (std::size_t s = 0; s < stats.size_histogram.size(); ++s)
      if (stats.size_histogram[s] > 0)
        size_rows.push_back({double(s), double(stats.size_histogram[s])});
    write_csv(config.out_dir + "/cluster_sizes.csv",
              {"cluster_size", "count"}, size_rows);
  });
}

kl_status kl_run_estimate(const kl_config* cfg) {
  return guarded([&] {
    const ExperimentConfig config = config_of(cfg);
    const std::vector<EventLog> logs = load_logs(config);

    std::vector<std::vector<double>> summary;
    for (std::size_t ti = 0; ti < config.time_samples.size(); ++ti) {
      const double t = config.time_samples[ti];
      const PhaseHistogram f1 =
          estimate_f1_at(logs, t, config.binning, config.params);
      write_histogram(f1, artifact(config.out_dir, "f1", ti, ".arr"));
      write_histogram_csv(f1, artifact(config.out_dir, "f1", ti, ".csv"));

      const PhaseHistogram f1p =
          estimate_f1_at(logs, t, config.binning_pair, config.params);
      const PhaseHistogram f2p =
          counts_at(logs, t, config.binning_pair, 2).normalize(config.params.mu);
      const Cumulants cum = cumulants(f1p, f2p);
      write_histogram(cum.e2, artifact(config.out_dir, "e2", ti, ".arr"));
      summary.push_back({t, l1_norm(f1), f1.overflow_weight,
                         l1_norm(cum.e2)});
    }
    write_csv(config.out_dir + "/estimate_summary.csv",
              {"time", "f1_l1_norm", "f1_overflow_weight", "e2_l1_norm"},
              summary);
  });
}

kl_status kl_run_boltzmann(const kl_config* cfg) {
  return guarded([&] {
    const ExperimentConfig config = config_of(cfg);
    const std::vector<DistributionField> fields =
        solve_at_times(config, config.time_samples);
    std::vector<std::vector<double>> rows;
    for (std::size_t ti = 0; ti < fields.size(); ++ti) {
      write_field(fields[ti],
                  artifact(config.out_dir, "boltzmann", ti, ".arr"));
      const Moments mo = moments(fields[ti]);
      rows.push_back({config.time_samples[ti], mo.mass, mo.momentum[0],
                      mo.momentum[1], mo.momentum[2], mo.energy});
    }
    write_csv(config.out_dir + "/moments.csv",
              {"time", "mass", "momentum_x", "momentum_y", "momentum_z",
               "energy"},
              rows);
  });
}

kl_status kl_run_compare(const kl_config* cfg) {
  return guarded([&] {
    const ExperimentConfig config = config_of(cfg);
    std::vector<std::vector<double>> rows;
    PlotSeries series{"L1 distance", {}, {}};
    for (std::size_t ti = 0; ti < config.time_samples.size(); ++ti) {
      const PhaseHistogram f1 =
          read_histogram(artifact(config.out_dir, "f1", ti, ".arr"));
      const DistributionField field =
          read_field(artifact(config.out_dir, "boltzmann", ti, ".arr"));
      const PhaseHistogram ref = field_to_histogram(field, f1.spec);
      const double dist = l1_distance(f1, ref);
      rows.push_back({config.time_samples[ti], dist});
      series.xs.push_back(config.time_samples[ti]);
      series.ys.push_back(dist);
    }
    write_csv(config.out_dir + "/compare.csv", {"time", "l1_distance"}, rows);
    PlotSpec plot;
    plot.title = "empirical vs kinetic L1 distance";
    plot.x_label = "time";
    plot.y_label = "L1 distance";
    plot.series = {series};
    write_svg_plot(plot, config.out_dir + "/compare.svg");
  });
}

kl_status kl_run_sweep(const kl_config* cfg, const double* eps_list,
                       int n_eps) {
  return guarded([&] {
    if (!eps_list || n_eps < 1) throw ConfigError("sweep: empty diameter list");
    convergence_study(config_of(cfg),
                      std::vector<double>(eps_list, eps_list + n_eps));
  });
}

kl_status kl_run_penrose(int max_n, char* report, size_t report_len) {
  return guarded([&] {
    if (report == nullptr || report_len == 0)
      throw ConfigError("penrose: report buffer is null or empty");
    if (max_n < 2 || max_n > 7)
      throw ConfigError("penrose: max_n must be between 2 and 7");
    std::uint64_t checked = 0;
    for (int n = 2; n <= max_n; ++n) {
      const int n_edges = n * (n - 1) / 2;
      const std::uint64_t n_masks = std::uint64_t(1) << n_edges;
      for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
        OverlapMatrix m = OverlapMatrix::empty(std::size_t(n));
        int bit = 0;
        for (std::size_t i = 0; i < std::size_t(n); ++i)
          for (std::size_t j = i + 1; j < std::size_t(n); ++j, ++bit)
            if (mask & (std::uint64_t(1) << bit)) m.set(i, j, true);
        const PenroseResult r = penrose_bound_check(m);
        if (!r.bound_holds)
          throw RuntimeError(
              "penrose: bound violated on n=" + std::to_string(n) +
              " mask=" + std::to_string(mask));
        ++checked;
      }
    }
    if (report && report_len > 0) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "all 2^%d overlap matrices (n=%d) satisfy |phi| <= tree "
                    "count (%llu matrices checked for n<=%d)",
                    max_n * (max_n - 1) / 2, max_n,
                    (unsigned long long)checked, max_n);
      std::snprintf(report, report_len, "%s", line);
    }
  });
}

}  // extern "C"

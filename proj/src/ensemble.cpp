// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <optional>

#include "kinetic/harness.hpp"
#include "kinetic/parallel.hpp"

namespace kin {

namespace {

std::string member_log_name(int member) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "member_%04d.klev", member);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
}

}  // namespace

EnsembleResult run_ensemble(const ExperimentConfig& config, bool persist_logs) {
  config.validate();
  ensure_dir(config.out_dir);
  const auto t_start = std::chrono::steady_clock::now();

  const int m = config.ensemble;
  std::vector<std::optional<EventLog>> slots(static_cast<std::size_t>(m));
  std::vector<std::string> failures(static_cast<std::size_t>(m));

  parallel_for(std::size_t(m), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t member = lo; member < hi; ++member) {
      try {
        RngStream rng(config.base_seed, member);
        Configuration cfg =
            sample_configuration(config.params, config.initial, rng);
        EventLog log = run(cfg, config.t_end, config.params);
        log.seed = config.base_seed;
        log.stream = member;
        slots[member] = std::move(log);
      } catch (const std::exception& e) {
        failures[member] = e.what();
      }
    }
  });

  EnsembleResult out;
  out.manifest.version = kVersionString;
  out.manifest.config_text = to_config_text(config);
  out.manifest.base_seed = config.base_seed;
  const std::string dir = config.out_dir + "/";

  std::vector<std::vector<double>> cluster_rows;
  for (int member = 0; member < m; ++member) {
    auto& slot = slots[std::size_t(member)];
    if (!slot) {
      out.manifest.failed_members.push_back(member);
      continue;
    }
    out.manifest.member_streams.push_back(std::uint64_t(member));
    if (persist_logs) {
      const std::string name = member_log_name(member);
      write_event_log(*slot, dir + name);
      out.manifest.artifact_checksums[name] = fnv1a64_file(dir + name);
    }
    const double w_short = std::min(config.windows.short_window, config.t_end);
    const double w_long = std::min(config.windows.long_window, config.t_end);
    const ClusterStatsRow r_short = cluster_stats_member(*slot, 0.0, w_short);
    const ClusterStatsRow r_long = cluster_stats_member(*slot, 0.0, w_long);
    cluster_rows.push_back(
        {double(member), double(slot->initial.size()),
         double(slot->events.size()), w_short, r_short.mean_size,
         double(r_short.max_size), r_short.cyclic_particle_fraction, w_long,
         r_long.mean_size, double(r_long.max_size),
         r_long.cyclic_particle_fraction, r_long.largest_component_fraction});
    out.logs.push_back(std::move(*slot));
    slot.reset();
  }

  write_csv(dir + "clusters.csv",
            {"member", "n_particles", "n_collisions", "window_short_time",
             "mean_cluster_size_short", "max_cluster_size_short",
             "cyclic_particle_fraction_short", "window_long_time",
             "mean_cluster_size_long", "max_cluster_size_long",
             "cyclic_particle_fraction_long", "largest_component_fraction_long"},
            cluster_rows);
  out.manifest.artifact_checksums["clusters.csv"] =
      fnv1a64_file(dir + "clusters.csv");

  out.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  out.manifest.write(dir + "manifest.txt");

  if (!out.manifest.failed_members.empty()) {
    std::string msg = "ensemble: members failed:";
    for (int member : out.manifest.failed_members)
      msg += " " + std::to_string(member) + " (" +
             failures[std::size_t(member)] + ")";
    throw RuntimeError(msg);
  }
  return out;
}

EnsembleCounts counts_at(const std::vector<EventLog>& logs, double t,
                         const BinningSpec& spec, int order) {
  std::vector<Configuration> configs(logs.size());
  parallel_for(logs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) configs[i] = evolve_to(logs[i], t);
  });
  return count_ensemble(configs, spec, order);
}

PhaseHistogram estimate_f1_at(const std::vector<EventLog>& logs, double t,
                              const BinningSpec& spec,
                              const ModelParams& params) {
  return counts_at(logs, t, spec, 1).normalize(params.mu);
}

double bootstrap_sd(
    std::size_t n_members, int n_resamples, std::uint64_t seed,
    std::uint64_t stream,
    const std::function<double(const std::vector<std::uint32_t>&)>& statistic) {
  if (n_members < 2 || n_resamples < 2)
    throw ContractError("bootstrap: need >= 2 members and >= 2 resamples");
  RngStream rng(seed, stream);
  std::vector<double> stats;
  stats.reserve(std::size_t(n_resamples));
  std::vector<std::uint32_t> mult(n_members);
  for (int r = 0; r < n_resamples; ++r) {
    std::fill(mult.begin(), mult.end(), 0u);
    for (std::size_t k = 0; k < n_members; ++k)
      ++mult[std::size_t(rng.uniform() * double(n_members))];
    stats.push_back(statistic(mult));
  }
  const double mean =
      std::accumulate(stats.begin(), stats.end(), 0.0) / double(stats.size());
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / double(stats.size() - 1));
}

std::vector<DistributionField> solve_at_times(const ExperimentConfig& config,
                                              const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw ContractError("solve_at_times: times must be increasing and >= 0");
  }
  const VelocityGrid vg = config.velocity_grid();
  const SpatialGrid xg = config.spatial_grid();
  const AngularQuadrature quad =
      config.params.d == 2 ? AngularQuadrature::uniform_circle(config.solver.n_omega)
                           : AngularQuadrature::icosahedral();
  const InitialDataSpec& init = config.initial;
  const int d = config.params.d;
  DistributionField f = tabulate_inhomogeneous(
      vg, xg, [&](const Vec& x, const Vec& v) {
        return init.density(d, PhasePoint{x, v});
      });

  std::vector<DistributionField> out;
  double t = 0.0;
  for (double target : times) {
    while (t < target - 1e-12) {
      const double dt = std::min(config.solver.dt, target - t);
      f = step_inhomogeneous(f, dt, quad);
      t += dt;
    }
    out.push_back(f);
  }
  return out;
}

PhaseHistogram field_to_histogram(const DistributionField& f,
                                  const BinningSpec& spec) {
  spec.validate();
  if (!f.xgrid)
    throw ConfigError("field/histogram comparison: field has no spatial grid");
  const SpatialGrid& s = *f.xgrid;
  const VelocityGrid& g = f.vgrid;
  auto mismatch = [&](const std::string& what) -> ConfigError {
    return ConfigError(
        "field/histogram shape mismatch: " + what + " (field: d=" +
        std::to_string(g.d) + " nx=" + std::to_string(s.n) +
        " nv=" + std::to_string(g.n) + ", binning: d=" +
        std::to_string(spec.d) + " nx=" + std::to_string(spec.nx) +
        " nv=" + std::to_string(spec.nv) + ")");
  };
  if (g.d != spec.d) throw mismatch("dimension");
  if (s.n % spec.nx != 0) throw mismatch("spatial cell count");
  if (g.n % spec.nv != 0) throw mismatch("velocity cell count");
  for (int a = 0; a < g.d; ++a) {
    if (std::abs(s.lo[a] - spec.x_lo[a]) > 1e-12 ||
        std::abs(s.hi[a] - spec.x_hi[a]) > 1e-12)
      throw mismatch("spatial box");
    if (std::abs(-g.v_max - spec.v_lo[a]) > 1e-12 ||
        std::abs(g.v_max - spec.v_hi[a]) > 1e-12)
      throw mismatch("velocity box");
  }
  // both layouts are row-major x-axes-then-v-axes; block-average when the
  // field grid refines the binning (cell-centered means per coarse cell)
  const int d = g.d;
  const int rx = s.n / spec.nx, rv = g.n / spec.nv;
  PhaseHistogram h;
  h.spec = spec;
  h.order = 1;
  h.values.assign(spec.n_cells(), 0.0);
  std::vector<int> fine(std::size_t(2 * d), 0);  // x-axes then v-axes
  const std::size_t nn = g.n_nodes();
  for (std::size_t xc = 0; xc < s.n_cells(); ++xc) {
    std::size_t rem = xc;
    for (int a = d - 1; a >= 0; --a) {
      fine[std::size_t(a)] = int(rem % std::size_t(s.n));
      rem /= std::size_t(s.n);
    }
    for (std::size_t vc = 0; vc < nn; ++vc) {
      rem = vc;
      for (int a = d - 1; a >= 0; --a) {
        fine[std::size_t(d + a)] = int(rem % std::size_t(g.n));
        rem /= std::size_t(g.n);
      }
      std::size_t coarse = 0;
      for (int a = 0; a < d; ++a)
        coarse = coarse * std::size_t(spec.nx) +
                 std::size_t(fine[std::size_t(a)] / rx);
      for (int a = 0; a < d; ++a)
        coarse = coarse * std::size_t(spec.nv) +
                 std::size_t(fine[std::size_t(d + a)] / rv);
      h.values[coarse] += f.values[xc * nn + vc];
    }
  }
  const double block = std::pow(double(rx), d) * std::pow(double(rv), d);
  for (auto& v : h.values) v /= block;
  return h;
}

StudyReport convergence_study(const ExperimentConfig& config,
                              const std::vector<double>& eps_list) {
  if (eps_list.size() < 3)
    throw ConfigError("sweep: need at least 3 diameters");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("sweep: diameters must be strictly decreasing");
  config.validate();
  ensure_dir(config.out_dir);
  const std::string dir = config.out_dir + "/";

  StudyReport report;
  report.time_samples = config.time_samples;

  // one reference kinetic solution; the sweep shares f0
  const std::vector<DistributionField> fields =
      solve_at_times(config, config.time_samples);
  std::vector<PhaseHistogram> field_hists;
  for (const auto& f : fields)
    field_hists.push_back(field_to_histogram(f, config.binning));

  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    ExperimentConfig cfg = config;
    cfg.params = ModelParams::make(config.params.d, eps_list[ei],
                                   config.params.beta);
    char sub[32];
    std::snprintf(sub, sizeof sub, "eps_%zu", ei);
    cfg.out_dir = dir + sub;
    EnsembleResult ens = run_ensemble(cfg, /*persist_logs=*/false);

    StudyRow row;
    row.eps = cfg.params.eps;
    row.mu = cfg.params.mu;

    for (std::size_t ti = 0; ti < config.time_samples.size(); ++ti) {
      const EnsembleCounts counts =
          counts_at(ens.logs, config.time_samples[ti], config.binning, 1);
      const PhaseHistogram f1 = counts.normalize(cfg.params.mu);
      row.l1_at_times.push_back(l1_distance(f1, field_hists[ti]));
      row.l1_noise.push_back(bootstrap_sd(
          ens.logs.size(), 200, config.base_seed, 1000 + 10 * ei + ti,
          [&](const std::vector<std::uint32_t>& mult) {
            return l1_distance(counts.normalize(cfg.params.mu, mult),
                               field_hists[ti]);
          }));
    }

    // pair correlations at the first sample time, on the coarse binning
    {
      const double t_pair = config.time_samples.front();
      const EnsembleCounts c1 =
          counts_at(ens.logs, t_pair, config.binning_pair, 1);
      const EnsembleCounts c2 =
          counts_at(ens.logs, t_pair, config.binning_pair, 2);
      auto e2_stat = [&](const std::vector<std::uint32_t>& mult) {
        const PhaseHistogram f1 = c1.normalize(cfg.params.mu, mult);
        const PhaseHistogram f2 = c2.normalize(cfg.params.mu, mult);
        return l1_norm(cumulants(f1, f2).e2);
      };
      row.e2_norm = e2_stat({});
      row.e2_noise = bootstrap_sd(ens.logs.size(), 200, config.base_seed,
                                  2000 + ei, e2_stat);
    }

    // cluster statistics over both windows
    {
      std::vector<double> cyc(ens.logs.size());
      double giant = 0.0, mean_size = 0.0;
      const double w_short = std::min(config.windows.short_window, config.t_end);
      const double w_long = std::min(config.windows.long_window, config.t_end);
      for (std::size_t li = 0; li < ens.logs.size(); ++li) {
        const ClusterStatsRow rs =
            cluster_stats_member(ens.logs[li], 0.0, w_short);
        const ClusterStatsRow rl =
            cluster_stats_member(ens.logs[li], 0.0, w_long);
        cyc[li] = rs.cyclic_particle_fraction;
        giant += rl.largest_component_fraction;
        mean_size += rs.mean_size;
      }
      row.cyclic_fraction =
          std::accumulate(cyc.begin(), cyc.end(), 0.0) / double(cyc.size());
      row.giant_fraction = giant / double(ens.logs.size());
      row.mean_cluster_size = mean_size / double(ens.logs.size());
      row.cyclic_noise = bootstrap_sd(
          ens.logs.size(), 200, config.base_seed, 3000 + ei,
          [&](const std::vector<std::uint32_t>& mult) {
            double acc = 0.0, wsum = 0.0;
            for (std::size_t li = 0; li < cyc.size(); ++li) {
              acc += double(mult[li]) * cyc[li];
              wsum += double(mult[li]);
            }
            return wsum > 0.0 ? acc / wsum : 0.0;
          });
    }

    report.rows.push_back(std::move(row));
  }

  // chaos decay fit: ||E2|| against mu on log-log axes
  {
    std::vector<double> mus, e2s;
    for (const auto& row : report.rows) {
      mus.push_back(row.mu);
      e2s.push_back(row.e2_norm);
    }
    report.chaos_fit = fit_power_law(mus, e2s);
  }

  // artifacts: distance table, chaos table, cluster trends, plots
  {
    std::vector<std::vector<double>> rows;
    for (const auto& r : report.rows)
      for (std::size_t ti = 0; ti < report.time_samples.size(); ++ti)
        rows.push_back({r.eps, r.mu, report.time_samples[ti],
                        r.l1_at_times[ti], r.l1_noise[ti]});
    write_csv(dir + "sweep_distance.csv",
              {"eps", "mu", "time", "l1_distance", "bootstrap_sd"}, rows);
    PlotSpec plot;
    plot.title = "empirical vs kinetic L1 distance";
    plot.x_label = "sphere diameter eps";
    plot.y_label = "L1 distance";
    plot.log_x = true;
    plot.log_y = true;
    for (std::size_t ti = 0; ti < report.time_samples.size(); ++ti) {
      PlotSeries s;
      s.name = "t = " + std::to_string(report.time_samples[ti]);
      for (const auto& r : report.rows) {
        s.xs.push_back(r.eps);
        s.ys.push_back(std::max(r.l1_at_times[ti], 1e-16));
      }
      plot.series.push_back(std::move(s));
    }
    write_svg_plot(plot, dir + "sweep_distance.svg");
  }
  {
    std::vector<std::vector<double>> rows;
    for (const auto& r : report.rows)
      rows.push_back({r.eps, r.mu, r.e2_norm, r.e2_noise});
    write_csv(dir + "sweep_chaos.csv",
              {"eps", "mu", "e2_l1_norm", "bootstrap_sd"}, rows);
    PlotSpec plot;
    plot.title = "second cumulant decay (fit slope " +
                 std::to_string(report.chaos_fit.slope) + ")";
    plot.x_label = "intensity mu";
    plot.y_label = "||E2|| (L1)";
    plot.log_x = true;
    plot.log_y = true;
    PlotSeries s;
    s.name = "||E2||";
    for (const auto& r : report.rows) {
      s.xs.push_back(r.mu);
      s.ys.push_back(std::max(r.e2_norm, 1e-16));
    }
    plot.series.push_back(std::move(s));
    write_svg_plot(plot, dir + "sweep_chaos.svg");
  }
  {
    std::vector<std::vector<double>> rows;
    for (const auto& r : report.rows)
      rows.push_back({r.eps, r.mu, r.cyclic_fraction, r.cyclic_noise,
                      r.giant_fraction, r.mean_cluster_size});
    write_csv(dir + "sweep_clusters.csv",
              {"eps", "mu", "cyclic_particle_fraction", "bootstrap_sd",
               "largest_component_fraction", "mean_cluster_size"},
              rows);
    PlotSpec plot;
    plot.title = "cluster statistics across the sweep";
    plot.x_label = "sphere diameter eps";
    plot.y_label = "fraction";
    plot.log_x = true;
    PlotSeries s1{"cyclic fraction (short window)", {}, {}};
    PlotSeries s2{"largest component (long window)", {}, {}};
    for (const auto& r : report.rows) {
      s1.xs.push_back(r.eps);
      s1.ys.push_back(r.cyclic_fraction);
      s2.xs.push_back(r.eps);
      s2.ys.push_back(r.giant_fraction);
    }
    plot.series = {s1, s2};
    write_svg_plot(plot, dir + "sweep_clusters.svg");
  }

  return report;
}

}  // namespace kin

// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: flat key-value configuration, reproducible
// seeded ensembles with persisted artifacts and manifests, convergence
// studies over a sweep of sphere diameters, CSV and SVG emission.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kinetic/boltzmann.hpp"
#include "kinetic/dynamics.hpp"
#include "kinetic/estimators.hpp"
#include "kinetic/graphs.hpp"
#include "kinetic/sampler.hpp"

namespace kin {

// ---------------------------------------------------------------------------
// configuration

// Flat typed key-value text: one `key = value` per line, `#` comments,
// no nesting. Vector values are whitespace-separated numbers.
struct KeyValueConfig {
  std::map<std::string, std::string> entries;

  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  std::string require_str(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;
};

struct SolverSettings {
  int n_v = 24;        // velocity nodes per axis
  double v_max = 6.0;  // velocity box half-width
  int n_x = 0;         // spatial cells per axis; 0 = use binning nx
  double dt = 0.02;
  int n_omega = 16;    // angular nodes (d=2); d=3 uses the fixed 12-node rule
};

struct GraphWindows {
  double short_window = 0.2;  // recollision statistics window
  double long_window = 2.0;   // giant-component window
};

struct ExperimentConfig {
  ModelParams params = ModelParams::make(2, 1e-3, 1.0);
  InitialDataSpec initial;
  double t_end = 1.0;
  int ensemble = 1;
  std::uint64_t base_seed = 1;
  BinningSpec binning;        // order-1 estimates and solver comparison
  BinningSpec binning_pair;   // coarse binning for order-2/3 cumulants
  SolverSettings solver;
  GraphWindows windows;
  std::vector<double> time_samples{1.0};
  std::string out_dir = ".";

  // documented key list in config_keys() below
  static ExperimentConfig from_kv(const KeyValueConfig& kv);
  void validate() const;

  VelocityGrid velocity_grid() const;
  SpatialGrid spatial_grid() const;  // binning x-box, solver.n_x cells
};

// one line per supported key: "key  default  meaning"
std::string config_keys();

// Canonical key-value snapshot; from_kv(parse_string(...)) round-trips.
std::string to_config_text(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// manifests and checksums

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);

struct RunManifest {
  std::string version;
  std::string config_text;  // key-value snapshot sufficient to reproduce
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> member_streams;
  std::vector<int> failed_members;
  double wall_seconds = 0.0;
  std::map<std::string, std::uint64_t> artifact_checksums;

  void write(const std::string& path) const;
  static RunManifest read(const std::string& path);
};

extern const char* const kVersionString;

// ---------------------------------------------------------------------------
// ensemble pipeline

struct EnsembleResult {
  RunManifest manifest;
  std::vector<EventLog> logs;  // successful members only, in member order
};

// Samples and runs `ensemble` members with streams (base_seed, member id),
// persists event logs and per-member cluster statistics under out_dir,
// writes the manifest. Member failures are recorded and skipped.
EnsembleResult run_ensemble(const ExperimentConfig& config,
                            bool persist_logs = true);

// Order-1 histogram of the ensemble evolved to time t.
PhaseHistogram estimate_f1_at(const std::vector<EventLog>& logs, double t,
                              const BinningSpec& spec, const ModelParams& params);

// Ensemble counts of given order at time t (for cumulants and bootstrap).
EnsembleCounts counts_at(const std::vector<EventLog>& logs, double t,
                         const BinningSpec& spec, int order);

// Bootstrap: resample members with replacement `n_resamples` times, apply
// the statistic to each resample's multiplicity vector, return the sample
// standard deviation. Deterministic in (seed, stream).
double bootstrap_sd(std::size_t n_members, int n_resamples,
                    std::uint64_t seed, std::uint64_t stream,
                    const std::function<double(const std::vector<std::uint32_t>&)>& statistic);

// Solve the inhomogeneous equation from the configured initial density and
// return the field at each requested time (strictly increasing).
std::vector<DistributionField> solve_at_times(const ExperimentConfig& config,
                                              const std::vector<double>& times);

// Reshape an inhomogeneous field into an order-1 histogram on a matching
// binning; throws ConfigError with a shape diagnostic on mismatch.
PhaseHistogram field_to_histogram(const DistributionField& f,
                                  const BinningSpec& spec);

// ---------------------------------------------------------------------------
// convergence study

struct StudyRow {
  double eps = 0.0;
  double mu = 0.0;
  std::vector<double> l1_at_times;     // aligned with config.time_samples
  std::vector<double> l1_noise;        // bootstrap sd of each distance
  double e2_norm = 0.0;                // ||E2||_L1 at the first sample time
  double e2_noise = 0.0;
  double cyclic_fraction = 0.0;        // short window
  double cyclic_noise = 0.0;
  double giant_fraction = 0.0;         // long window
  double mean_cluster_size = 0.0;
};

struct StudyReport {
  std::vector<double> time_samples;
  std::vector<StudyRow> rows;   // one per eps, in input order
  PowerLawFit chaos_fit;        // log ||E2|| vs log mu
};

// Runs the full pipeline per eps (strictly decreasing list, >= 3 values)
// and emits distance/chaos/cluster CSVs and SVG plots under out_dir.
StudyReport convergence_study(const ExperimentConfig& config,
                              const std::vector<double>& eps_list);

// ---------------------------------------------------------------------------
// plots

struct PlotSeries {
  std::string name;
  std::vector<double> xs, ys;
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
  std::vector<PlotSeries> series;
};

void write_svg_plot(const PlotSpec& plot, const std::string& path);

// CSV with an explicit header row; write-temp-then-rename.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace kin

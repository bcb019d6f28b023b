// SPDX-License-Identifier: Apache-2.0
//
// Statistical layer: empirical field, binned correlation functions
// f1, f2, f3, cumulants E2, E3, L1 distances and power-law fits.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinetic/phase.hpp"
#include "kinetic/rng.hpp"

namespace kin {

struct BinningSpec {
  int d = 2;
  Vec x_lo, x_hi;
  int nx = 1;  // cells per axis in x
  Vec v_lo, v_hi;
  int nv = 1;  // cells per axis in v
  std::size_t cell_budget = std::size_t(1) << 24;

  void validate() const;
  std::size_t n_cells() const;     // nx^d * nv^d
  double cell_volume() const;      // phase-space volume of one cell
  // flat cell index, nullopt for points outside the box
  std::optional<std::size_t> cell_index(const PhasePoint& z) const;
  // cell center from flat index
  PhasePoint cell_center(std::size_t idx) const;

  bool operator==(const BinningSpec& o) const;
};

struct PhaseHistogram {
  BinningSpec spec;
  int order = 1;                // k in {1, 2, 3}
  std::vector<double> values;   // dense over cells^k
  double overflow_weight = 0.0; // normalized weight binned outside the box

  std::size_t n_entries() const { return values.size(); }
};

// Raw per-member cell counts, kept so ensembles can be re-normalized and
// bootstrap-resampled without touching the configurations again.
struct EnsembleCounts {
  BinningSpec spec;
  int order = 1;
  std::vector<std::vector<std::uint32_t>> member_counts;
  std::vector<std::uint64_t> member_overflow;

  // Histogram over the members with the given multiplicities (empty =
  // every member once). mu is the model intensity mu_eps.
  PhaseHistogram normalize(double mu,
                           const std::vector<std::uint32_t>& multiplicity = {}) const;
};

// mu^-1 sum_i h(z_i)
double empirical_field(const Configuration& config,
                       const std::function<double(const PhasePoint&)>& h,
                       const ModelParams& params);

// Order-k counting pass over an ensemble of configurations (ordered
// distinct k-tuples for k >= 2).
EnsembleCounts count_ensemble(const std::vector<Configuration>& configs,
                              const BinningSpec& spec, int order);

PhaseHistogram bin_f1(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params);
PhaseHistogram bin_f2(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params);
PhaseHistogram bin_f3(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params);

struct Cumulants {
  PhaseHistogram e2;
  std::optional<PhaseHistogram> e3;
};

// E2 = f2 - f1 x f1; E3 = f3 - sum of the 3 (f2 x f1) pairings
// + 2 f1 x f1 x f1.
Cumulants cumulants(const PhaseHistogram& f1, const PhaseHistogram& f2,
                    const PhaseHistogram* f3 = nullptr);

// sum |a - b| * cellvol^order over entries
double l1_distance(const PhaseHistogram& a, const PhaseHistogram& b);
double l1_norm(const PhaseHistogram& a);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;     // in log space
  double max_residual = 0.0;  // max |log y - fit|
};

PowerLawFit fit_power_law(const std::vector<double>& xs,
                          const std::vector<double>& ys);

// --- serialization: dense array with a shape header (see hist_io.cpp) ---
void write_histogram(const PhaseHistogram& h, const std::string& path);
PhaseHistogram read_histogram(const std::string& path);
void write_histogram_csv(const PhaseHistogram& h, const std::string& path);

}  // namespace kin

// SPDX-License-Identifier: Apache-2.0
//
// Collision graphs over a time window: connected components, cycle ranks,
// recollision labels, overlap detection between independently evolved
// trajectory bundles, and the Ursell/Penrose combinatorics.

#pragma once

#include <cstdint>
#include <vector>

#include "kinetic/dynamics.hpp"

namespace kin {

struct GraphEdge {
  std::size_t event_index = 0;
  std::uint32_t i = 0, j = 0;
  double t = 0.0;
};

struct InteractionGraph {
  double t0 = 0.0, t1 = 0.0;
  std::size_t n_vertices = 0;  // particle ids 0..n-1
  std::vector<GraphEdge> edges;
};

struct ClusterSummary {
  std::size_t size = 0;          // particles in the component
  std::size_t n_collisions = 0;  // edges
  std::size_t cycle_rank = 0;    // edges - size + 1
  std::size_t n_recollisions = 0;
  std::vector<std::uint32_t> members;
};

InteractionGraph build_graph(const EventLog& log, double t0, double t1);

std::vector<ClusterSummary> components(const InteractionGraph& graph);

// Processing edges in time order, an edge is a recollision iff its
// endpoints are already connected (directly or indirectly). One label per
// event of the log restricted to [t0, t1], in edge order.
std::vector<bool> label_recollisions(const EventLog& log, double t0, double t1);

// Piecewise-linear trajectory of one particle: breakpoints (t, x, v),
// position x + v (t - t_k) on [t_k, t_{k+1}].
struct Trajectory {
  std::uint32_t id = 0;
  std::vector<double> times;  // strictly increasing, covers [front, back]
  std::vector<Vec> xs;
  std::vector<Vec> vs;
};

// Extract trajectories of the given particles over [t0, t1] from a log.
std::vector<Trajectory> extract_trajectories(
    const EventLog& log, const std::vector<std::uint32_t>& ids, double t0,
    double t1);

// True iff some cross pair approaches below eps anywhere in the common
// window, by closed-form minimization over each linear segment pair.
bool overlap_check(const std::vector<Trajectory>& traj_a,
                   const std::vector<Trajectory>& traj_b, double eps);

struct OverlapMatrix {
  std::size_t n = 0;
  std::vector<bool> adj;  // row-major n x n, symmetric, zero diagonal

  bool at(std::size_t i, std::size_t j) const { return adj[i * n + j]; }
  void set(std::size_t i, std::size_t j, bool v) {
    adj[i * n + j] = v;
    adj[j * n + i] = v;
  }
  static OverlapMatrix empty(std::size_t n) {
    return OverlapMatrix{n, std::vector<bool>(n * n, false)};
  }
};

// phi = sum over connected spanning subgraphs with edges among the overlap
// edges of (-1)^{#edges}. Exact; refuses n > 10.
long long ursell_phi(const OverlapMatrix& overlap);

struct PenroseResult {
  long long phi = 0;
  long long tree_count = 0;
  bool bound_holds = false;
};

// tree_count by exhaustive enumeration for n <= 8 cross-checked against an
// exact integer matrix-tree determinant; determinant alone above that.
PenroseResult penrose_bound_check(const OverlapMatrix& overlap);

struct ClusterStats {
  std::vector<std::size_t> size_histogram;  // index = size, value = count
  double mean_size = 0.0;
  std::size_t max_size = 0;
  double cyclic_particle_fraction = 0.0;  // particles in components with rho >= 1
  double largest_component_fraction = 0.0;  // mean over ensemble of max|lambda|/N
  std::size_t n_members = 0;
};

ClusterStats cluster_stats(const std::vector<const EventLog*>& logs, double t0,
                           double t1);

// per-member rows for CSV export
struct ClusterStatsRow {
  double mean_size = 0.0;
  std::size_t max_size = 0;
  double cyclic_particle_fraction = 0.0;
  double largest_component_fraction = 0.0;
};
ClusterStatsRow cluster_stats_member(const EventLog& log, double t0, double t1);

}  // namespace kin

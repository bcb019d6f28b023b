// SPDX-License-Identifier: Apache-2.0

#include "kinetic/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>

namespace kin {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  // returns false if already connected
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

InteractionGraph build_graph(const EventLog& log, double t0, double t1) {
  if (t0 > t1 || t0 < log.initial.t || t1 > log.t_end)
    throw ContractError("build_graph: window outside [t_initial, t_end]");
  InteractionGraph g;
  g.t0 = t0;
  g.t1 = t1;
  g.n_vertices = log.initial.size();
  for (std::size_t k = 0; k < log.events.size(); ++k) {
    const auto& e = log.events[k];
    if (e.t < t0 || e.t > t1) continue;
    g.edges.push_back(GraphEdge{k, e.i, e.j, e.t});
  }
  return g;
}

std::vector<ClusterSummary> components(const InteractionGraph& graph) {
  UnionFind uf(graph.n_vertices);
  for (const auto& e : graph.edges) uf.unite(e.i, e.j);

  std::map<std::uint32_t, ClusterSummary> by_root;
  for (std::uint32_t v = 0; v < graph.n_vertices; ++v) {
    auto& c = by_root[uf.find(v)];
    c.members.push_back(v);
    ++c.size;
  }
  for (const auto& e : graph.edges) ++by_root[uf.find(e.i)].n_collisions;

  // second pass for recollision counts (time-ordered union-find)
  std::vector<GraphEdge> ordered = graph.edges;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const GraphEdge& a, const GraphEdge& b) { return a.t < b.t; });
  UnionFind uf2(graph.n_vertices);
  std::map<std::uint32_t, std::size_t> recol;
  for (const auto& e : ordered)
    if (!uf2.unite(e.i, e.j)) ++recol[uf.find(e.i)];

  std::vector<ClusterSummary> out;
  out.reserve(by_root.size());
  for (auto& [root, c] : by_root) {
    c.cycle_rank = c.n_collisions - c.size + 1;
    c.n_recollisions = recol.count(root) ? recol[root] : 0;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<bool> label_recollisions(const EventLog& log, double t0, double t1) {
  InteractionGraph g = build_graph(log, t0, t1);
  std::vector<GraphEdge> ordered = g.edges;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const GraphEdge& a, const GraphEdge& b) { return a.t < b.t; });
  UnionFind uf(g.n_vertices);
  std::map<std::size_t, bool> by_event;
  for (const auto& e : ordered) by_event[e.event_index] = !uf.unite(e.i, e.j);
  std::vector<bool> labels;
  labels.reserve(g.edges.size());
  for (const auto& e : g.edges) labels.push_back(by_event[e.event_index]);
  return labels;
}

std::vector<Trajectory> extract_trajectories(
    const EventLog& log, const std::vector<std::uint32_t>& ids, double t0,
    double t1) {
  if (t0 > t1 || t0 < log.initial.t || t1 > log.t_end)
    throw ContractError("extract_trajectories: window outside log range");
  std::vector<Trajectory> out;
  for (std::uint32_t id : ids) {
    Trajectory tr;
    tr.id = id;
    // replay this particle's breakpoints
    Vec x = log.initial.particles[id].z.x;
    Vec v = log.initial.particles[id].z.v;
    double t_last = log.initial.t;
    auto emit = [&](double t, const Vec& xx, const Vec& vv) {
      tr.times.push_back(t);
      tr.xs.push_back(xx);
      tr.vs.push_back(vv);
    };
    for (const auto& e : log.events) {
      if (e.t > t1) break;
      if (e.i != id && e.j != id) continue;
      x += (e.t - t_last) * v;
      t_last = e.t;
      const Vec v_new = (e.i == id) ? e.v_post.first : e.v_post.second;
      if (e.t >= t0) {
        if (tr.times.empty()) emit(t0, x - (e.t - t0) * v, v);
        emit(e.t, x, v_new);
      }
      v = v_new;
    }
    if (tr.times.empty()) emit(t0, x + (t0 - t_last) * v, v);
    if (tr.times.back() < t1) {
      const Vec xe = tr.xs.back() + (t1 - tr.times.back()) * tr.vs.back();
      emit(t1, xe, tr.vs.back());
    }
    out.push_back(std::move(tr));
  }
  return out;
}

namespace {

// min over [lo, hi] of |r0 + dv (t - tref)|
double segment_min_distance(const Vec& r0, const Vec& dv, double tref,
                            double lo, double hi) {
  auto dist = [&](double t) { return norm(r0 + (t - tref) * dv); };
  double best = std::min(dist(lo), dist(hi));
  const double a = norm2(dv);
  if (a > 0.0) {
    const double tstar = tref - dot(r0, dv) / a;
    if (tstar > lo && tstar < hi) best = std::min(best, dist(tstar));
  }
  return best;
}

double pair_min_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times.front() != b.times.front() || a.times.back() != b.times.back())
    throw ContractError("overlap_check: mismatched windows");
  double best = std::numeric_limits<double>::infinity();
  std::size_t ia = 0, ib = 0;
  double t = a.times.front();
  const double t_end = a.times.back();
  while (t < t_end) {
    const double ta = ia + 1 < a.times.size() ? a.times[ia + 1] : t_end;
    const double tb = ib + 1 < b.times.size() ? b.times[ib + 1] : t_end;
    const double seg_end = std::min(ta, tb);
    const Vec xa = a.xs[ia] + (t - a.times[ia]) * a.vs[ia];
    const Vec xb = b.xs[ib] + (t - b.times[ib]) * b.vs[ib];
    best = std::min(best, segment_min_distance(xa - xb, a.vs[ia] - b.vs[ib], t,
                                               t, seg_end));
    if (seg_end >= t_end) break;
    if (ta <= seg_end && ia + 1 < a.times.size()) ++ia;
    if (tb <= seg_end && ib + 1 < b.times.size()) ++ib;
    t = seg_end;
  }
  return best;
}

}  // namespace

bool overlap_check(const std::vector<Trajectory>& traj_a,
                   const std::vector<Trajectory>& traj_b, double eps) {
  for (const auto& a : traj_a)
    for (const auto& b : traj_b)
      if (pair_min_distance(a, b) < eps) return true;
  return false;
}

namespace {

std::vector<std::pair<int, int>> overlap_edges(const OverlapMatrix& m) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = i + 1; j < m.n; ++j)
      if (m.at(i, j)) edges.emplace_back(int(i), int(j));
  return edges;
}

bool subset_connected_spanning(int n, const std::vector<std::pair<int, int>>& edges,
                               std::uint64_t mask) {
  UnionFind uf(static_cast<std::size_t>(n));
  int united = 0;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (mask & (1ULL << e))
      if (uf.unite(std::uint32_t(edges[e].first), std::uint32_t(edges[e].second)))
        ++united;
  return united == n - 1;
}

long long phi_by_enumeration(int n, const std::vector<std::pair<int, int>>& edges) {
  long long phi = 0;
  const std::uint64_t total = 1ULL << edges.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (!subset_connected_spanning(n, edges, mask)) continue;
    phi += (std::popcount(mask) % 2 == 0) ? 1 : -1;
  }
  return phi;
}

// Signed connected-subgraph sum via the exponential-formula recursion:
// with A(S) = [no overlap edge inside S] (the full signed subgraph sum),
// C(S) = A(S) - sum over proper T containing min(S) of C(T) A(S \ T).
long long phi_by_subset_recursion(const OverlapMatrix& m) {
  const int n = int(m.n);
  const std::uint32_t full = (1u << n) - 1;
  std::vector<int> edge_free(full + 1, 1);
  for (std::uint32_t s = 0; s <= full; ++s) {
    for (int i = 0; i < n && edge_free[s]; ++i) {
      if (!(s & (1u << i))) continue;
      for (int j = i + 1; j < n; ++j)
        if ((s & (1u << j)) && m.at(std::size_t(i), std::size_t(j))) {
          edge_free[s] = 0;
          break;
        }
    }
  }
  std::vector<long long> c(full + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int v0 = std::countr_zero(s);
    long long val = edge_free[s];
    const std::uint32_t rest = s & ~(1u << v0);
    // proper sub-subsets T of s containing v0
    for (std::uint32_t sub = rest; sub > 0; sub = (sub - 1) & rest) {
      const std::uint32_t t = s & ~sub;  // contains v0, proper since sub > 0
      val -= c[t] * edge_free[sub];
    }
    c[s] = val;
  }
  return c[full];
}

// exact integer determinant (Bareiss) of the Laplacian minor
long long spanning_trees_matrix_tree(const OverlapMatrix& m) {
  const int n = int(m.n);
  if (n <= 1) return 1;
  const int k = n - 1;
  std::vector<std::vector<long long>> a(k, std::vector<long long>(k, 0));
  for (int i = 0; i < k; ++i) {
    long long deg = 0;
    for (int j = 0; j < n; ++j)
      if (j != i && m.at(std::size_t(i), std::size_t(j))) ++deg;
    a[i][i] = deg;
    for (int j = 0; j < k; ++j)
      if (j != i && m.at(std::size_t(i), std::size_t(j))) a[i][j] = -1;
  }
  long long prev = 1;
  for (int p = 0; p < k - 1; ++p) {
    if (a[p][p] == 0) {
      int swap_row = -1;
      for (int r = p + 1; r < k; ++r)
        if (a[r][p] != 0) {
          swap_row = r;
          break;
        }
      if (swap_row < 0) return 0;  // singular: disconnected graph
      std::swap(a[p], a[swap_row]);
      for (int j = 0; j < k; ++j) a[p][j] = -a[p][j];  // keep the sign
    }
    for (int i = p + 1; i < k; ++i)
      for (int j = p + 1; j < k; ++j)
        a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
    prev = a[p][p];
  }
  return a[k - 1][k - 1];
}

long long spanning_trees_enumeration(int n,
                                     const std::vector<std::pair<int, int>>& edges) {
  if (n == 1) return 1;
  if (int(edges.size()) < n - 1) return 0;
  long long count = 0;
  // subsets of size n-1
  std::vector<int> idx(std::size_t(n - 1));
  std::iota(idx.begin(), idx.end(), 0);
  const int m = int(edges.size());
  for (;;) {
    std::uint64_t mask = 0;
    for (int e : idx) mask |= 1ULL << e;
    if (subset_connected_spanning(n, edges, mask)) ++count;
    // next combination
    int pos = n - 2;
    while (pos >= 0 && idx[std::size_t(pos)] == m - (n - 1 - pos)) --pos;
    if (pos < 0) break;
    ++idx[std::size_t(pos)];
    for (int q = pos + 1; q < n - 1; ++q)
      idx[std::size_t(q)] = idx[std::size_t(q - 1)] + 1;
  }
  return count;
}

}  // namespace

long long ursell_phi(const OverlapMatrix& overlap) {
  if (overlap.n > 10)
    throw ContractError("ursell_phi: n > 10 refused (combinatorial explosion)");
  if (overlap.n == 0) return 0;
  if (overlap.n == 1) return 1;
  const auto edges = overlap_edges(overlap);
  if (edges.size() <= 20)
    return phi_by_enumeration(int(overlap.n), edges);
  return phi_by_subset_recursion(overlap);
}

PenroseResult penrose_bound_check(const OverlapMatrix& overlap) {
  if (overlap.n > 10)
    throw ContractError("penrose_bound_check: n > 10 refused");
  PenroseResult r;
  r.phi = ursell_phi(overlap);
  if (overlap.n <= 8) {
    r.tree_count = spanning_trees_enumeration(int(overlap.n), overlap_edges(overlap));
    const long long det = spanning_trees_matrix_tree(overlap);
    if (det != r.tree_count)
      throw RuntimeError("penrose_bound_check: enumeration/matrix-tree mismatch");
  } else {
    r.tree_count = spanning_trees_matrix_tree(overlap);
  }
  r.bound_holds = std::llabs(r.phi) <= r.tree_count;
  return r;
}

ClusterStatsRow cluster_stats_member(const EventLog& log, double t0, double t1) {
  const auto comps = components(build_graph(log, t0, t1));
  ClusterStatsRow row;
  const std::size_t n = log.initial.size();
  if (comps.empty() || n == 0) return row;
  std::size_t cyclic_particles = 0, largest = 0, total = 0;
  for (const auto& c : comps) {
    total += c.size;
    largest = std::max(largest, c.size);
    row.max_size = std::max(row.max_size, c.size);
    if (c.cycle_rank >= 1) cyclic_particles += c.size;
  }
  row.mean_size = double(total) / double(comps.size());
  row.cyclic_particle_fraction = double(cyclic_particles) / double(n);
  row.largest_component_fraction = double(largest) / double(n);
  return row;
}

ClusterStats cluster_stats(const std::vector<const EventLog*>& logs, double t0,
                           double t1) {
  if (logs.empty()) throw ContractError("cluster_stats: empty ensemble");
  ClusterStats st;
  st.n_members = logs.size();
  double mean_acc = 0.0, cyc_acc = 0.0, largest_acc = 0.0;
  for (const EventLog* log : logs) {
    const auto comps = components(build_graph(*log, t0, t1));
    std::size_t largest = 0, cyclic = 0;
    std::size_t total = 0;
    for (const auto& c : comps) {
      if (st.size_histogram.size() <= c.size) st.size_histogram.resize(c.size + 1, 0);
      ++st.size_histogram[c.size];
      total += c.size;
      largest = std::max(largest, c.size);
      st.max_size = std::max(st.max_size, c.size);
      if (c.cycle_rank >= 1) cyclic += c.size;
    }
    const std::size_t n = log->initial.size();
    mean_acc += comps.empty() ? 0.0 : double(total) / double(comps.size());
    cyc_acc += n ? double(cyclic) / double(n) : 0.0;
    largest_acc += n ? double(largest) / double(n) : 0.0;
  }
  st.mean_size = mean_acc / double(logs.size());
  st.cyclic_particle_fraction = cyc_acc / double(logs.size());
  st.largest_component_fraction = largest_acc / double(logs.size());
  return st;
}

}  // namespace kin

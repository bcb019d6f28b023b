// SPDX-License-Identifier: Apache-2.0

#include "kinetic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace kin {

namespace {

// Stable smaller root of |r + dv s|^2 = eps^2 given r.dv < 0.
// Returns (s, normal_speed) where normal_speed = sqrt(disc) = |dv.omega|
// at contact; nullopt if no root.
std::optional<std::pair<double, double>> contact_root(const Vec& r,
                                                      const Vec& dv,
                                                      double eps) {
  const double a = norm2(dv);
  if (a == 0.0) return std::nullopt;
  const double b = dot(r, dv);
  if (b >= 0.0) return std::nullopt;  // receding
  const double c = norm2(r) - eps * eps;
  const double disc = b * b - a * c;
  if (disc <= 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // c >= 0 here in normal operation; the quotient form avoids cancellation.
  // A slightly negative c (rounding at contact) is clamped to "now".
  const double s = std::max(0.0, c / (-b + sq));
  return std::make_pair(s, sq / eps);
}

constexpr double kGrazingTol = 1e-12;

struct QEvent {
  double t;
  std::uint32_t i, j;
  std::uint64_t ci, cj;  // collision counters at prediction time
};

struct QEventLater {
  bool operator()(const QEvent& a, const QEvent& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.i != b.i) return a.i > b.i;
    return a.j > b.j;
  }
};

struct CellKey {
  long long x = 0, y = 0, z = 0;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (long long v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::optional<double> predict_collision(const PhasePoint& p_i,
                                        const PhasePoint& p_j, double eps) {
  const Vec r = p_i.x - p_j.x;
  if (norm(r) < eps * (1.0 - 1e-12))
    throw ContractError("predict_collision: overlapping input");
  auto root = contact_root(r, p_i.v - p_j.v, eps);
  if (!root) return std::nullopt;
  if (root->second <= kGrazingTol) return std::nullopt;  // grazing, unscheduled
  return root->first;
}

EventLog run(const Configuration& config, double t_end,
             const ModelParams& params, const RunOptions& opts) {
  check_configuration(config, params);
  if (t_end < config.t) throw ContractError("run: t_end before initial time");

  EventLog log;
  log.params = params;
  log.initial = config;
  log.t_end = t_end;

  const std::size_t n = config.particles.size();
  if (n < 2 || t_end == config.t) return log;

  const double eps = params.eps;

  // Particle state in segment form: position x_last at time t_last.
  std::vector<Vec> x(n), v(n);
  std::vector<double> t_last(n, config.t);
  std::vector<std::uint64_t> count(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = config.particles[k].z.x;
    v[k] = config.particles[k].z.v;
  }
  auto pos_at = [&](std::size_t k, double t) { return x[k] + (t - t_last[k]) * v[k]; };

  // Zeno guard bookkeeping (per-pair burst counting).
  const double mft_scale =
      params.mu > 0 ? 1.0 : 1.0;  // desk scale: order-one mean free time
  const double zeno_window = 1e-12 * mft_scale;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, int>>
      pair_bursts;

  double t_now = config.t;
  while (t_now < t_end) {
    // --- build cell list from positions at t_now ---
    double vmax = 0.0;
    Vec lo = pos_at(0, t_now), hi = lo;
    std::vector<Vec> xs(n);
    for (std::size_t k = 0; k < n; ++k) {
      xs[k] = pos_at(k, t_now);
      vmax = std::max(vmax, norm(v[k]));
      for (int a = 0; a < params.d; ++a) {
        lo[a] = std::min(lo[a], xs[k][a]);
        hi[a] = std::max(hi[a], xs[k][a]);
      }
    }

    // Cell size targeting a mean occupancy, never below 2 eps; the horizon
    // follows from cell >= eps + 2 vmax dt_h.
    double extent = 0.0;
    for (int a = 0; a < params.d; ++a) extent = std::max(extent, hi[a] - lo[a]);
    double cell = std::max(2.0 * eps,
                           extent / std::max(1.0, std::floor(std::pow(
                                                      double(n) / opts.target_occupancy,
                                                      1.0 / params.d))));
    double dt_h = (vmax > 0.0) ? (cell - eps) / (2.0 * vmax)
                               : (t_end - t_now);
    double t_h_end = std::min(t_now + dt_h, t_end);
    const double vmax_used = vmax;

    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells;
    auto key_of = [&](const Vec& p) {
      CellKey k;
      k.x = static_cast<long long>(std::floor((p[0] - lo[0]) / cell));
      k.y = static_cast<long long>(std::floor((p[1] - lo[1]) / cell));
      if (params.d == 3)
        k.z = static_cast<long long>(std::floor((p[2] - lo[2]) / cell));
      return k;
    };
    std::vector<CellKey> my_key(n);
    for (std::size_t k = 0; k < n; ++k) {
      my_key[k] = key_of(xs[k]);
      cells[my_key[k]].push_back(static_cast<std::uint32_t>(k));
    }

    std::priority_queue<QEvent, std::vector<QEvent>, QEventLater> queue;

    auto neighbors_of = [&](std::uint32_t p, std::vector<std::uint32_t>& out) {
      out.clear();
      const CellKey c0 = my_key[p];
      const long long zlo = params.d == 3 ? -1 : 0;
      const long long zhi = params.d == 3 ? 1 : 0;
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dz = zlo; dz <= zhi; ++dz) {
            auto it = cells.find(CellKey{c0.x + dx, c0.y + dy, c0.z + dz});
            if (it == cells.end()) continue;
            for (std::uint32_t q : it->second)
              if (q != p) out.push_back(q);
          }
    };

    auto try_schedule = [&](std::uint32_t a, std::uint32_t b, double from_t) {
      PhasePoint pa{pos_at(a, from_t), v[a]};
      PhasePoint pb{pos_at(b, from_t), v[b]};
      auto root = contact_root(pa.x - pb.x, pa.v - pb.v, eps);
      if (!root || root->second <= kGrazingTol) return;
      const double tc = from_t + root->first;
      if (tc > t_h_end) return;
      QEvent e;
      e.t = tc;
      e.i = std::min(a, b);
      e.j = std::max(a, b);
      e.ci = count[e.i];
      e.cj = count[e.j];
      queue.push(e);
    };

    // initial predictions for this horizon: each particle vs forward ids in
    // its neighborhood (avoid double-scheduling)
    std::vector<std::uint32_t> nbrs;
    for (std::uint32_t p = 0; p < n; ++p) {
      neighbors_of(p, nbrs);
      for (std::uint32_t q : nbrs)
        if (q > p) try_schedule(p, q, t_now);
    }

    bool aborted = false;
    while (!queue.empty()) {
      QEvent e = queue.top();
      queue.pop();
      if (e.ci != count[e.i] || e.cj != count[e.j]) continue;  // stale
      if (e.t > t_h_end) break;

      // advance the pair to contact
      Vec xi = pos_at(e.i, e.t), xj = pos_at(e.j, e.t);
      Vec om = xi - xj;
      const double dist = norm(om);
      om *= 1.0 / dist;

      CollisionEvent ev;
      ev.t = e.t;
      ev.i = e.i;
      ev.j = e.j;
      ev.omega = om;
      ev.v_pre = {v[e.i], v[e.j]};
      ev.v_post = scatter(v[e.i], v[e.j], om);
      log.events.push_back(ev);

      x[e.i] = xi;
      x[e.j] = xj;
      t_last[e.i] = t_last[e.j] = e.t;
      v[e.i] = ev.v_post.first;
      v[e.j] = ev.v_post.second;
      ++count[e.i];
      ++count[e.j];

      // Zeno guard
      auto& burst = pair_bursts[{e.i, e.j}];
      if (e.t - burst.first <= zeno_window) {
        if (++burst.second > opts.zeno_max_pair_events) {
          std::ostringstream msg;
          msg << "run: Zeno guard tripped for pair (" << e.i << "," << e.j
              << ") near t=" << e.t;
          throw RuntimeError(msg.str());
        }
      } else {
        burst = {e.t, 1};
      }

      // post-collision speeds may exceed the horizon's velocity bound
      if (norm(v[e.i]) > vmax_used || norm(v[e.j]) > vmax_used) {
        t_now = e.t;
        aborted = true;
        break;
      }

      for (std::uint32_t p : {e.i, e.j}) {
        neighbors_of(p, nbrs);
        for (std::uint32_t q : nbrs) try_schedule(p, q, e.t);
      }
    }

    if (!aborted) t_now = t_h_end;
  }

  return log;
}

Configuration evolve_to(const EventLog& log, double t) {
  if (t < log.initial.t || t > log.t_end)
    throw ContractError("evolve_to: time outside [t_initial, t_end]");
  Configuration cfg = log.initial;
  std::vector<double> t_last(cfg.size(), cfg.t);
  for (const auto& ev : log.events) {
    if (ev.t > t) break;
    for (auto [idx, vpost] : {std::pair{ev.i, ev.v_post.first},
                              std::pair{ev.j, ev.v_post.second}}) {
      auto& p = cfg.particles[idx];
      p.z.x += (ev.t - t_last[idx]) * p.z.v;
      p.z.v = vpost;
      t_last[idx] = ev.t;
    }
  }
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    cfg.particles[k].z.x += (t - t_last[k]) * cfg.particles[k].z.v;
  }
  cfg.t = t;
  return cfg;
}

Configuration reverse_velocities(Configuration config) {
  for (auto& p : config.particles) p.z.v = -p.z.v;
  return config;
}

std::optional<double> mean_free_time_estimate(const EventLog& log) {
  if (log.events.empty()) return std::nullopt;
  const double elapsed = log.t_end - log.initial.t;
  return double(log.initial.size()) * elapsed / (2.0 * double(log.events.size()));
}

double replay_defect(const EventLog& log) {
  Configuration cfg = log.initial;
  std::vector<double> t_last(cfg.size(), cfg.t);
  double worst = 0.0;
  for (const auto& ev : log.events) {
    auto& pi = cfg.particles[ev.i];
    auto& pj = cfg.particles[ev.j];
    pi.z.x += (ev.t - t_last[ev.i]) * pi.z.v;
    pj.z.x += (ev.t - t_last[ev.j]) * pj.z.v;
    t_last[ev.i] = t_last[ev.j] = ev.t;
    Vec om = pi.z.x - pj.z.x;
    om *= 1.0 / norm(om);
    auto post = scatter(pi.z.v, pj.z.v, om);
    for (int a = 0; a < 3; ++a) {
      worst = std::max(worst, std::abs(post.first[a] - ev.v_post.first[a]));
      worst = std::max(worst, std::abs(post.second[a] - ev.v_post.second[a]));
    }
    pi.z.v = ev.v_post.first;
    pj.z.v = ev.v_post.second;
  }
  return worst;
}

}  // namespace kin

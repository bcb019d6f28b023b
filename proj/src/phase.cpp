// SPDX-License-Identifier: Apache-2.0

#include "kinetic/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace kin {

ModelParams ModelParams::make(int d, double eps, double beta) {
  if (d != 2 && d != 3) throw ContractError("ModelParams: d must be 2 or 3");
  if (!(eps > 0.0)) throw ContractError("ModelParams: eps must be positive");
  if (!(beta > 0.0)) throw ContractError("ModelParams: beta must be positive");
  ModelParams p;
  p.d = d;
  p.eps = eps;
  p.mu = std::pow(eps, -(d - 1));
  p.beta = beta;
  return p;
}

double min_pair_distance(const Configuration& cfg) {
  double best = std::numeric_limits<double>::infinity();
  const auto& ps = cfg.particles;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      best = std::min(best, norm(ps[i].z.x - ps[j].z.x));
  return best;
}

void check_configuration(const Configuration& cfg, const ModelParams& p,
                         double dist_tol_rel) {
  std::set<std::uint32_t> ids;
  for (const auto& part : cfg.particles) {
    if (!finite(part.z.x) || !finite(part.z.v))
      throw ContractError("configuration: non-finite phase point");
    ids.insert(part.id);
  }
  if (ids.size() != cfg.particles.size())
    throw ContractError("configuration: duplicate particle ids");
  if (!ids.empty() && (*ids.begin() != 0 || *ids.rbegin() != ids.size() - 1))
    throw ContractError("configuration: ids not contiguous from 0");
  if (cfg.particles.size() > 1 &&
      min_pair_distance(cfg) < p.eps * (1.0 - dist_tol_rel))
    throw ContractError("configuration: hard-sphere exclusion violated");
}

std::pair<Vec, Vec> scatter(const Vec& v, const Vec& v_star, const Vec& omega) {
  if (std::abs(norm(omega) - 1.0) > 1e-12)
    throw ContractError("scatter: omega is not a unit vector");
  const double proj = dot(v - v_star, omega);
  return {v - proj * omega, v_star + proj * omega};
}

InvariantDefect collision_invariant_defect(const std::pair<Vec, Vec>& pre,
                                           const std::pair<Vec, Vec>& post) {
  InvariantDefect d;
  d.momentum = (post.first + post.second) - (pre.first + pre.second);
  d.energy = (norm2(post.first) + norm2(post.second)) -
             (norm2(pre.first) + norm2(pre.second));
  return d;
}

double maxwellian(int d, double beta, const Vec& v) {
  if (!(beta > 0.0)) throw ContractError("maxwellian: beta must be positive");
  const double pref = std::pow(beta / (2.0 * M_PI), 0.5 * d);
  return pref * std::exp(-0.5 * beta * norm2(v));
}

double weighted_sup_norm(const std::vector<PhaseNode>& nodes, double beta) {
  double best = 0.0;
  for (const auto& n : nodes) {
    const double w = std::abs(n.f) * std::exp(0.5 * beta * norm2(n.v));
    if (!std::isfinite(w)) throw ContractError("weighted_sup_norm: non-finite value");
    best = std::max(best, w);
  }
  return best;
}

double l_inf1_norm(const std::vector<PhaseNode>& nodes, int d, double beta) {
  // For each lattice point k with |x - k| <= 1 for some support node,
  // accumulate the local weighted sup. Balls overlap; nodes may count
  // toward several k.
  struct Key {
    long long k[3];
    bool operator<(const Key& o) const {
      for (int i = 0; i < 3; ++i) {
        if (k[i] != o.k[i]) return k[i] < o.k[i];
      }
      return false;
    }
  };
  std::map<Key, double> cells;
  for (const auto& n : nodes) {
    if (n.f == 0.0) continue;
    if (!std::isfinite(n.f)) throw ContractError("l_inf1_norm: non-finite value");
    const double w = std::abs(n.f) * std::exp(0.5 * beta * norm2(n.v));
    long long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
      lo[a] = static_cast<long long>(std::ceil(n.x[a] - 1.0));
      hi[a] = static_cast<long long>(std::floor(n.x[a] + 1.0));
    }
    Key key{};
    for (long long i = lo[0]; i <= hi[0]; ++i)
      for (long long j = lo[1]; j <= hi[1]; ++j)
        for (long long l = lo[2]; l <= hi[2]; ++l) {
          Vec k = make_vec(d, double(i), double(j), double(l));
          if (norm(n.x - k) > 1.0) continue;
          key.k[0] = i;
          key.k[1] = j;
          key.k[2] = l;
          auto [it, _] = cells.try_emplace(key, 0.0);
          it->second = std::max(it->second, w);
        }
  }
  double total = 0.0;
  for (const auto& [k, v] : cells) total += v;
  return total;
}

}  // namespace kin

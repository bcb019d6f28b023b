// SPDX-License-Identifier: Apache-2.0
//
// Phase-space kinematics: model parameters, phase points, configurations,
// elastic hard-sphere scattering, Maxwellians and the weighted norms used
// as convergence metrics.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/vec.hpp"

namespace kin {

struct ModelParams {
  int d = 2;          // spatial dimension, 2 or 3
  double eps = 1e-3;  // sphere diameter
  double mu = 0.0;    // intensity mu = eps^-(d-1), stored redundantly
  double beta = 1.0;  // inverse temperature

  static ModelParams make(int d, double eps, double beta);
};

struct PhasePoint {
  Vec x;
  Vec v;
};

struct Particle {
  std::uint32_t id = 0;
  PhasePoint z;
};

struct Configuration {
  double t = 0.0;
  std::vector<Particle> particles;

  std::size_t size() const { return particles.size(); }
};

// Smallest pairwise distance, +inf for fewer than two particles.
double min_pair_distance(const Configuration& cfg);

// ids distinct and contiguous from 0, all components finite, pairwise
// distances >= eps within a 1e-12*eps tolerance.
void check_configuration(const Configuration& cfg, const ModelParams& p,
                         double dist_tol_rel = 1e-12);

// Elastic scattering: v' = v - ((v - v*).w) w, v*' = v* + ((v - v*).w) w.
// Requires |w| = 1 within 1e-12.
std::pair<Vec, Vec> scatter(const Vec& v, const Vec& v_star, const Vec& omega);

struct InvariantDefect {
  Vec momentum;
  double energy = 0.0;
};

InvariantDefect collision_invariant_defect(const std::pair<Vec, Vec>& pre,
                                           const std::pair<Vec, Vec>& post);

// M_beta(v) = (beta/2pi)^(d/2) exp(-beta |v|^2 / 2)
double maxwellian(int d, double beta, const Vec& v);

// A scalar function tabulated on phase-space nodes (x_i, v_i). Used by the
// weighted norms; layouts are the caller's concern, only (v, value) pairs
// plus an optional x are consumed.
struct PhaseNode {
  Vec x;
  Vec v;
  double f = 0.0;
};

// ||f||_{L^inf_beta} = max over nodes of |f| exp(beta |v|^2 / 2)
double weighted_sup_norm(const std::vector<PhaseNode>& nodes, double beta);

// Sum over unit lattice cells k in Z^d meeting the support of
// sup_{|x-k|<=1} sup_v |f| exp(beta|v|^2/2), computed on the given nodes.
// Overlapping balls double-count by definition.
double l_inf1_norm(const std::vector<PhaseNode>& nodes, int d, double beta);

}  // namespace kin

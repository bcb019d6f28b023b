// SPDX-License-Identifier: Apache-2.0
//
// Grand-canonical initial data: Poisson particle count with intensity
// mu_eps, i.i.d. phase points from f0, whole configuration rejected until
// the hard-sphere exclusion holds.

#pragma once

#include <cstdint>
#include <vector>

#include "kinetic/phase.hpp"
#include "kinetic/rng.hpp"

namespace kin {

enum class InitialKind {
  GaussianXMaxwellianV,
  UniformBoxXMaxwellianV,
  TwoBumpV,  // anisotropic velocity mixture, spatially uniform on a box
  BumpXMaxwellianV,  // smooth compactly supported radial bump in x
};

struct VelocityBump {
  Vec center;
  double beta = 1.0;
  double weight = 1.0;
};

struct InitialDataSpec {
  InitialKind kind = InitialKind::UniformBoxXMaxwellianV;
  // spatial law
  Vec box_lo;          // uniform-box kinds
  Vec box_hi;
  Vec gauss_center;    // gaussian and bump kinds (bump center)
  double gauss_sigma = 1.0;
  double bump_radius = 1.0;  // bump kind: support radius; the profile is
                             // the C-infinity mollifier exp(-1/(1-r^2))
  // velocity law
  double beta = 1.0;               // single-Maxwellian kinds
  std::vector<VelocityBump> bumps;  // two-bump kind

  void validate(int d) const;

  // f0(x, v), the probability density being sampled
  double density(int d, const PhasePoint& z) const;
  // the velocity-weighted sup bound C0 = ||f0 e^{beta|v|^2/2}||_inf is
  // finite iff every bump beta is >= the declared beta; validate() checks.
};

PhasePoint sample_phase_point(int d, const InitialDataSpec& spec, RngStream& rng);

struct SampleDiagnostics {
  std::uint64_t attempts = 0;
  std::uint64_t rejected = 0;
};

// N ~ Poisson(mu); particles i.i.d. from f0; whole configuration resampled
// until pairwise exclusion holds. Throws RuntimeError with the empirical
// rejection rate after max_retries failures.
Configuration sample_configuration(const ModelParams& params,
                                   const InitialDataSpec& spec, RngStream& rng,
                                   std::uint64_t max_retries = 100000,
                                   SampleDiagnostics* diag = nullptr);

// Fraction of unconditioned draws satisfying exclusion.
double acceptance_rate_probe(const ModelParams& params,
                             const InitialDataSpec& spec,
                             std::uint64_t n_trials, RngStream& rng);

}  // namespace kin

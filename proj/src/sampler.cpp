// SPDX-License-Identifier: Apache-2.0

#include "kinetic/sampler.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace kin {

namespace {

Vec sample_uniform_box(int d, const Vec& lo, const Vec& hi, RngStream& rng) {
  Vec x;
  for (int a = 0; a < d; ++a) x[a] = rng.uniform(lo[a], hi[a]);
  return x;
}

Vec sample_gaussian(int d, const Vec& center, double sigma, RngStream& rng) {
  Vec x;
  for (int a = 0; a < d; ++a) x[a] = center[a] + sigma * rng.normal();
  return x;
}

Vec sample_maxwellian(int d, double beta, const Vec& center, RngStream& rng) {
  const double s = 1.0 / std::sqrt(beta);
  Vec v;
  for (int a = 0; a < d; ++a) v[a] = center[a] + s * rng.normal();
  return v;
}

// mollifier profile exp(-1/(1-u)) on u = (r/R)^2 in [0,1)
double mollifier(double u) {
  return u < 1.0 ? std::exp(-1.0 / (1.0 - u)) : 0.0;
}

// normalization of the unit-radius mollifier: int_{|y|<1} exp(-1/(1-|y|^2)) dy
double mollifier_norm(int d) {
  static const double cache[2] = {
      [] {  // d = 2: 2 pi int r m(r^2) dr = pi int_0^1 m(u) du
        double acc = 0.0;
        const int n = 1 << 14;
        for (int i = 0; i < n; ++i) {
          const double u = (i + 0.5) / n;
          acc += mollifier(u);
        }
        return M_PI * acc / n;
      }(),
      [] {  // d = 3: 4 pi int r^2 m(r^2) dr
        double acc = 0.0;
        const int n = 1 << 14;
        for (int i = 0; i < n; ++i) {
          const double r = (i + 0.5) / n;
          acc += r * r * mollifier(r * r);
        }
        return 4.0 * M_PI * acc / n;
      }()};
  return cache[d - 2];
}

double box_volume(int d, const Vec& lo, const Vec& hi) {
  double vol = 1.0;
  for (int a = 0; a < d; ++a) vol *= hi[a] - lo[a];
  return vol;
}

bool in_box(int d, const Vec& x, const Vec& lo, const Vec& hi) {
  for (int a = 0; a < d; ++a)
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  return true;
}

}  // namespace

void InitialDataSpec::validate(int d) const {
  switch (kind) {
    case InitialKind::GaussianXMaxwellianV:
      if (!(gauss_sigma > 0.0)) throw ContractError("spec: gauss_sigma <= 0");
      if (!(beta > 0.0)) throw ContractError("spec: beta <= 0");
      break;
    case InitialKind::UniformBoxXMaxwellianV:
      if (!(box_volume(d, box_lo, box_hi) > 0.0))
        throw ContractError("spec: degenerate spatial box");
      if (!(beta > 0.0)) throw ContractError("spec: beta <= 0");
      break;
    case InitialKind::BumpXMaxwellianV:
      if (!(bump_radius > 0.0)) throw ContractError("spec: bump_radius <= 0");
      if (!(beta > 0.0)) throw ContractError("spec: beta <= 0");
      break;
    case InitialKind::TwoBumpV: {
      if (!(box_volume(d, box_lo, box_hi) > 0.0))
        throw ContractError("spec: degenerate spatial box");
      if (bumps.empty()) throw ContractError("spec: two-bump with no bumps");
      double wsum = 0.0;
      for (const auto& b : bumps) {
        if (!(b.beta > 0.0)) throw ContractError("spec: bump beta <= 0");
        if (b.weight < 0.0) throw ContractError("spec: negative bump weight");
        wsum += b.weight;
      }
      if (std::abs(wsum - 1.0) > 1e-12)
        throw ContractError("spec: bump weights must sum to 1");
      break;
    }
  }
}

double InitialDataSpec::density(int d, const PhasePoint& z) const {
  switch (kind) {
    case InitialKind::GaussianXMaxwellianV: {
      double gx = 1.0;
      for (int a = 0; a < d; ++a) {
        const double u = (z.x[a] - gauss_center[a]) / gauss_sigma;
        gx *= std::exp(-0.5 * u * u) / (gauss_sigma * std::sqrt(2.0 * M_PI));
      }
      return gx * maxwellian(d, beta, z.v);
    }
    case InitialKind::UniformBoxXMaxwellianV: {
      if (!in_box(d, z.x, box_lo, box_hi)) return 0.0;
      return maxwellian(d, beta, z.v) / box_volume(d, box_lo, box_hi);
    }
    case InitialKind::BumpXMaxwellianV: {
      Vec y = z.x - gauss_center;
      const double u = norm2(y) / (bump_radius * bump_radius);
      if (u >= 1.0) return 0.0;
      const double norm_d =
          mollifier_norm(d) * std::pow(bump_radius, double(d));
      return mollifier(u) / norm_d * maxwellian(d, beta, z.v);
    }
    case InitialKind::TwoBumpV: {
      if (!in_box(d, z.x, box_lo, box_hi)) return 0.0;
      double fv = 0.0;
      for (const auto& b : bumps)
        fv += b.weight * maxwellian(d, b.beta, z.v - b.center);
      return fv / box_volume(d, box_lo, box_hi);
    }
  }
  return 0.0;
}

PhasePoint sample_phase_point(int d, const InitialDataSpec& spec,
                              RngStream& rng) {
  PhasePoint z;
  switch (spec.kind) {
    case InitialKind::GaussianXMaxwellianV:
      z.x = sample_gaussian(d, spec.gauss_center, spec.gauss_sigma, rng);
      z.v = sample_maxwellian(d, spec.beta, Vec{}, rng);
      break;
    case InitialKind::UniformBoxXMaxwellianV:
      z.x = sample_uniform_box(d, spec.box_lo, spec.box_hi, rng);
      z.v = sample_maxwellian(d, spec.beta, Vec{}, rng);
      break;
    case InitialKind::BumpXMaxwellianV: {
      // rejection against the uniform law on the bounding box; the
      // mollifier peak is e^{-1}
      const double R = spec.bump_radius;
      for (;;) {
        Vec y;
        for (int a = 0; a < d; ++a) y[a] = rng.uniform(-R, R);
        const double u = norm2(y) / (R * R);
        if (u < 1.0 && rng.uniform() * std::exp(-1.0) <= mollifier(u)) {
          z.x = spec.gauss_center + y;
          break;
        }
      }
      z.v = sample_maxwellian(d, spec.beta, Vec{}, rng);
      break;
    }
    case InitialKind::TwoBumpV: {
      z.x = sample_uniform_box(d, spec.box_lo, spec.box_hi, rng);
      double u = rng.uniform();
      std::size_t pick = spec.bumps.size() - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < spec.bumps.size(); ++i) {
        acc += spec.bumps[i].weight;
        if (u < acc) {
          pick = i;
          break;
        }
      }
      const auto& b = spec.bumps[pick];
      z.v = sample_maxwellian(d, b.beta, b.center, rng);
      break;
    }
  }
  return z;
}

namespace {

bool exclusion_holds(const std::vector<Particle>& ps, double eps) {
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (norm(ps[i].z.x - ps[j].z.x) < eps) return false;
  return true;
}

}  // namespace

Configuration sample_configuration(const ModelParams& params,
                                   const InitialDataSpec& spec, RngStream& rng,
                                   std::uint64_t max_retries,
                                   SampleDiagnostics* diag) {
  spec.validate(params.d);
  SampleDiagnostics local;
  for (std::uint64_t attempt = 0; attempt <= max_retries; ++attempt) {
    ++local.attempts;
    const std::uint64_t n = rng.poisson(params.mu);
    Configuration cfg;
    cfg.t = 0.0;
    cfg.particles.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      cfg.particles[i].id = static_cast<std::uint32_t>(i);
      cfg.particles[i].z = sample_phase_point(params.d, spec, rng);
    }
    if (exclusion_holds(cfg.particles, params.eps)) {
      if (diag) *diag = local;
      return cfg;
    }
    ++local.rejected;
  }
  std::ostringstream msg;
  msg << "sample_configuration: exhausted " << max_retries
      << " retries; empirical rejection rate "
      << double(local.rejected) / double(local.attempts);
  throw RuntimeError(msg.str());
}

double acceptance_rate_probe(const ModelParams& params,
                             const InitialDataSpec& spec,
                             std::uint64_t n_trials, RngStream& rng) {
  if (n_trials < 1) throw ContractError("acceptance_rate_probe: n_trials < 1");
  spec.validate(params.d);
  std::uint64_t accepted = 0;
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    const std::uint64_t n = rng.poisson(params.mu);
    std::vector<Particle> ps(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      ps[i].id = static_cast<std::uint32_t>(i);
      ps[i].z = sample_phase_point(params.d, spec, rng);
    }
    if (exclusion_holds(ps, params.eps)) ++accepted;
  }
  return double(accepted) / double(n_trials);
}

}  // namespace kin

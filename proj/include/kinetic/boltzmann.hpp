// SPDX-License-Identifier: Apache-2.0
//
// Numerical Boltzmann equation: hard-sphere collision operator by direct
// quadrature, conservative correction, homogeneous and space-inhomogeneous
// steppers, free transport, Picard iteration of the mild form, entropy and
// moment diagnostics.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinetic/phase.hpp"

namespace kin {

struct VelocityGrid {
  int d = 2;
  double v_max = 6.0;  // box [-v_max, v_max]^d
  int n = 16;          // nodes per axis, cell-centered

  void validate() const;
  double dv() const { return 2.0 * v_max / n; }
  std::size_t n_nodes() const;
  Vec node(std::size_t flat) const;
  double node_coord(int i) const { return -v_max + (i + 0.5) * dv(); }
  bool operator==(const VelocityGrid& o) const {
    return d == o.d && v_max == o.v_max && n == o.n;
  }
};

struct SpatialGrid {
  int d = 2;
  Vec lo, hi;
  int n = 8;  // cells per axis, cell-centered

  double dx(int axis) const { return (hi[axis] - lo[axis]) / n; }
  std::size_t n_cells() const;
  Vec center(std::size_t flat) const;
  bool operator==(const SpatialGrid& o) const {
    return d == o.d && n == o.n && lo == o.lo && hi == o.hi;
  }
};

struct DistributionField {
  VelocityGrid vgrid;
  std::optional<SpatialGrid> xgrid;  // absent: spatially homogeneous
  std::vector<double> values;        // [x-cell][v-cell], row-major

  static DistributionField homogeneous(const VelocityGrid& g);
  static DistributionField inhomogeneous(const VelocityGrid& g,
                                         const SpatialGrid& s);
  std::size_t n_xcells() const { return xgrid ? xgrid->n_cells() : 1; }
  double cell_volume() const;  // dv^d (times dx^d when inhomogeneous)
  bool same_shape(const DistributionField& o) const;
};

struct AngularQuadrature {
  int d = 2;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  // uniform midpoint angles on S^1 (n even, antipodally closed)
  static AngularQuadrature uniform_circle(int n);
  // icosahedral vertices on S^2 (12 nodes, antipodally closed)
  static AngularQuadrature icosahedral();
};

// Q(f,f)(v) = sum_{v*,w} w_l dv^d ((v - v*).w)_+ [f(v')f(v*') - f(v)f(v*)]
// with off-grid values by multilinear interpolation, zero outside the box.
// Homogeneous fields only; refuses n^d above an internal budget.
DistributionField q_collision(const DistributionField& f,
                              const AngularQuadrature& quad);

// Removes the components of q spoiling the d+2 discrete moments by an
// f-weighted projection onto the collision invariants {1, v, |v|^2}: the
// output is q - f (a + b.v + c|v|^2), all d+2 moments zero to rounding.
// Corrections proportional to f keep tails at zero untouched.
DistributionField conservative_fix(const DistributionField& q,
                                   const DistributionField& f);

struct StepReport {
  double clipped_mass = 0.0;    // negative mass removed and restituted
  double outflow_mass = 0.0;    // transported beyond the spatial box
};

// Explicit midpoint (RK2) with conservative_fix at each stage; negative
// values clipped with proportional restitution (reported).
DistributionField step_homogeneous(const DistributionField& f, double dt,
                                   const AngularQuadrature& quad,
                                   StepReport* report = nullptr);

// Upper bound on dt * (max collision loss rate); step refuses > 0.5.
double stability_load(const DistributionField& f, double dt);

// Semi-Lagrangian S_t: pulls g(x - vt, v) by multilinear interpolation in
// x; zero inflow, outflow reported.
DistributionField free_transport(const DistributionField& f, double t,
                                 StepReport* report = nullptr);

// Strang splitting: half transport, collisions per spatial cell, half
// transport.
DistributionField step_inhomogeneous(const DistributionField& f, double dt,
                                     const AngularQuadrature& quad,
                                     StepReport* report = nullptr);

struct PicardResult {
  DistributionField f;
  double last_update = 0.0;  // sup distance between the final two iterates
  std::vector<double> update_history;
};

// Iterates f^(k+1)(s) = S_s f0 + int_0^s S_{s-u} Q(f^(k)(u)) du on a
// uniform time sub-grid (trapezoidal in u). Throws on detected divergence.
PicardResult picard_duhamel(const DistributionField& f0, double t,
                            int iterations, int n_time_cells,
                            const AngularQuadrature& quad);

struct EntropyReport {
  double h = 0.0;  // sum f log f dv^d
  double d = 0.0;  // -sum Q log f dv^d over cells with f > floor
};

EntropyReport entropy_and_dissipation(const DistributionField& f,
                                      const AngularQuadrature& quad);

struct Moments {
  double mass = 0.0;
  Vec momentum;
  double energy = 0.0;  // sum f |v|^2/2
};

Moments moments(const DistributionField& f);

// Maxwellian with the same mass, bulk velocity and temperature as f.
DistributionField matched_maxwellian(const DistributionField& f);

// Tabulate a callable f(x, v) (homogeneous: v only) on the grids.
DistributionField tabulate_homogeneous(const VelocityGrid& g,
                                       const std::function<double(const Vec&)>& f);
DistributionField tabulate_inhomogeneous(
    const VelocityGrid& g, const SpatialGrid& s,
    const std::function<double(const Vec&, const Vec&)>& f);

// --- serialization: dense array with a shape header (see field_io.cpp) ---
void write_field(const DistributionField& f, const std::string& path);
DistributionField read_field(const std::string& path);

}  // namespace kin

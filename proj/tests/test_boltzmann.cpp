// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "kinetic/boltzmann.hpp"

using namespace kin;

namespace {

VelocityGrid grid2(int n, double v_max = 6.0) {
  VelocityGrid g;
  g.d = 2;
  g.n = n;
  g.v_max = v_max;
  return g;
}

DistributionField maxwellian_field(const VelocityGrid& g, double beta = 1.0,
                                   const Vec& mean = Vec{}) {
  return tabulate_homogeneous(
      g, [&](const Vec& v) { return maxwellian(g.d, beta, v - mean); });
}

DistributionField two_bump_field(const VelocityGrid& g) {
  const Vec c1 = make_vec(2, 2, 0), c2 = make_vec(2, -2, 0);
  return tabulate_homogeneous(g, [&](const Vec& v) {
    return 0.5 * maxwellian(2, 2.0, v - c1) + 0.5 * maxwellian(2, 2.0, v - c2);
  });
}

double sup_norm(const DistributionField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const DistributionField& a, const DistributionField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace

TEST_CASE("grids and tabulation") {
  const VelocityGrid g = grid2(8, 4.0);
  CHECK(g.dv() == doctest::Approx(1.0));
  CHECK(g.n_nodes() == 64);
  CHECK(g.node_coord(0) == doctest::Approx(-3.5));
  CHECK(g.node_coord(7) == doctest::Approx(3.5));
  VelocityGrid bad = g;
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), ContractError);

  // tabulated Maxwellian nearly integrates to one on a wide grid
  const DistributionField m = maxwellian_field(grid2(32, 6.0));
  CHECK(moments(m).mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("collision operator: zero field and equilibrium decay") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(16);

  const DistributionField zero = DistributionField::homogeneous(grid2(16));
  const DistributionField qz = q_collision(zero, quad);
  CHECK(sup_norm(qz) == 0.0);

  // the Maxwellian annihilates Q up to discretization; the residual halves
  // with grid refinement
  const double r16 = sup_norm(q_collision(maxwellian_field(grid2(16)), quad));
  const double r32 = sup_norm(q_collision(maxwellian_field(grid2(32)), quad));
  CHECK(r16 > 0.0);
  CHECK(r32 <= 0.6 * r16);
}

TEST_CASE("corrected operator conserves the collision invariants") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(16);
  const VelocityGrid g = grid2(24);
  const DistributionField f = two_bump_field(g);
  const DistributionField q = conservative_fix(q_collision(f, quad), f);
  const Moments mq = moments(q);
  const double scale = std::max(1.0, sup_norm(q));
  CHECK(std::abs(mq.mass) <= 1e-12 * scale);
  CHECK(norm(mq.momentum) <= 1e-12 * scale);
  CHECK(std::abs(mq.energy) <= 1e-12 * scale);
}

TEST_CASE("conservative correction") {
  const VelocityGrid g = grid2(16);
  const DistributionField f = maxwellian_field(g);

  // the zero source has zero moments and passes through unchanged
  const DistributionField fixed0 =
      conservative_fix(DistributionField::homogeneous(g), f);
  CHECK(sup_norm(fixed0) == 0.0);

  // an already-conservative source is a fixed point of the correction
  DistributionField cons = DistributionField::homogeneous(g);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const Vec v = g.node(i);
    cons.values[i] = v[0] * v[1] * std::exp(-0.5 * norm2(v));
  }
  // v_x v_y e^{-|v|^2/2} is odd in each axis separately on a symmetric
  // grid: mass, momentum and energy moments all vanish exactly
  const DistributionField kept = conservative_fix(cons, f);
  CHECK(sup_diff(kept, cons) <= 1e-13 * std::max(1.0, sup_norm(cons)));

  // removing the moments from a generic source
  DistributionField raw = DistributionField::homogeneous(g);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const Vec v = g.node(i);
    raw.values[i] = std::exp(-0.3 * norm2(v)) * (1.0 + v[0] - 0.2 * v[1]);
  }
  const DistributionField fixed = conservative_fix(raw, f);
  const Moments m = moments(fixed);
  const double scale = std::max(1.0, sup_norm(raw));
  CHECK(std::abs(m.mass) <= 1e-12 * scale);
  CHECK(norm(m.momentum) <= 1e-12 * scale);
  CHECK(std::abs(m.energy) <= 1e-12 * scale);

  // f itself, used as the source: the fix removes it entirely (it lies in
  // the span of f times the invariants with a = 1, b = 0, c = 0)
  const DistributionField gone = conservative_fix(f, f);
  CHECK(sup_norm(gone) <= 1e-12 * sup_norm(f));

  // a vanishing weight leaves the projection underdetermined
  const DistributionField zero = DistributionField::homogeneous(g);
  CHECK_THROWS_AS(conservative_fix(raw, zero), RuntimeError);
}

TEST_CASE("homogeneous stepping: stationarity, conservation, stability") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(16);
  const VelocityGrid g = grid2(24);
  const DistributionField m0 = maxwellian_field(g);
  const double dt = 0.01;

  DistributionField f = m0;
  StepReport rep;
  for (int k = 0; k < 50; ++k) f = step_homogeneous(f, dt, quad, &rep);
  // the Maxwellian drifts only as fast as the discrete equilibrium defect
  // sup|Q(M)| allows over the elapsed half unit of time
  const double q_res = sup_norm(conservative_fix(q_collision(m0, quad), m0));
  CHECK(sup_diff(f, m0) <= 2.0 * 0.5 * q_res + 1e-12);

  // moments frozen to rounding over the same run
  const Moments a = moments(m0), b = moments(f);
  CHECK(std::abs(b.mass - a.mass) <= 1e-10);
  CHECK(norm(b.momentum - a.momentum) <= 1e-10);
  CHECK(std::abs(b.energy - a.energy) <= 1e-10);

  // a reckless time step is refused, not attempted
  CHECK(stability_load(m0, 1e3) > 0.5);
  CHECK_THROWS_AS(step_homogeneous(m0, 1e3, quad), ContractError);
  CHECK(stability_load(m0, dt) <= 0.5);
}

TEST_CASE("relaxation drives a two-bump state toward its Maxwellian") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(8);
  DistributionField f = two_bump_field(grid2(16));
  const DistributionField target = matched_maxwellian(f);
  const double d0 = sup_diff(f, target);
  for (int k = 0; k < 100; ++k) f = step_homogeneous(f, 0.01, quad);
  CHECK(sup_diff(f, target) <= 0.5 * d0);
}

TEST_CASE("free transport") {
  const VelocityGrid g = grid2(8, 4.0);
  SpatialGrid s;
  s.d = 2;
  s.lo = make_vec(2, -2, -2);
  s.hi = make_vec(2, 2, 2);
  s.n = 16;
  const DistributionField f = tabulate_inhomogeneous(
      g, s, [](const Vec& x, const Vec& v) {
        return std::exp(-4.0 * norm2(x)) * maxwellian(2, 1.0, v);
      });

  // t = 0 is the identity
  const DistributionField same = free_transport(f, 0.0);
  CHECK(sup_diff(same, f) == 0.0);

  // each velocity column's center of mass moves by v t
  const double t = 0.25;
  const DistributionField moved = free_transport(f, t);
  const std::size_t nv = g.n_nodes();
  for (std::size_t vi : {std::size_t(27), std::size_t(36)}) {
    const Vec v = g.node(vi);
    Vec com0, com1;
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t xi = 0; xi < s.n_cells(); ++xi) {
      const Vec x = s.center(xi);
      const double a = f.values[xi * nv + vi];
      const double b = moved.values[xi * nv + vi];
      com0 += x * a;
      m0 += a;
      com1 += x * b;
      m1 += b;
    }
    REQUIRE(m0 > 0.0);
    REQUIRE(m1 > 0.0);
    const Vec drift = com1 * (1.0 / m1) - com0 * (1.0 / m0);
    CHECK(norm(drift - v * t) <= 0.5 * s.dx(0));
  }

  // back-and-forth error shrinks under spatial refinement
  auto round_trip_err = [&](int nx) {
    SpatialGrid sg = s;
    sg.n = nx;
    const DistributionField h = tabulate_inhomogeneous(
        g, sg, [](const Vec& x, const Vec& v) {
          return std::exp(-4.0 * norm2(x)) * maxwellian(2, 1.0, v);
        });
    const DistributionField rt =
        free_transport(free_transport(h, 0.1), -0.1);
    return sup_diff(rt, h);
  };
  const double coarse = round_trip_err(16);
  const double fine = round_trip_err(64);
  CHECK(fine <= 0.5 * coarse);
}

TEST_CASE("inhomogeneous step matches the homogeneous one on uniform data") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(8);
  const VelocityGrid g = grid2(16);
  SpatialGrid s;
  s.d = 2;
  s.lo = make_vec(2, -2, -2);
  s.hi = make_vec(2, 2, 2);
  s.n = 8;
  const DistributionField fh = two_bump_field(g);
  DistributionField fi = DistributionField::inhomogeneous(g, s);
  for (std::size_t xi = 0; xi < s.n_cells(); ++xi)
    for (std::size_t vi = 0; vi < g.n_nodes(); ++vi)
      fi.values[xi * g.n_nodes() + vi] = fh.values[vi];

  const double dt = 0.01;
  const DistributionField sh = step_homogeneous(fh, dt, quad);
  const DistributionField si = step_inhomogeneous(fi, dt, quad);
  // deep-interior cells see the same collision update; transport moves
  // nothing because the data is x-uniform. Boundary outflow contaminates
  // at most one cell per half transport for slow velocities, so a cell
  // three layers in stays clean.
  const std::size_t nv = g.n_nodes();
  const std::size_t center = (std::size_t(4) * std::size_t(s.n) +
                              std::size_t(4)) * nv;
  double worst = 0.0;
  for (std::size_t vi = 0; vi < nv; ++vi) {
    const Vec v = g.node(vi);
    // keep velocities whose semi-Lagrangian stencil spans one cell at most
    if (std::abs(v[0]) * dt > s.dx(0) || std::abs(v[1]) * dt > s.dx(1))
      continue;
    worst = std::max(worst, std::abs(si.values[center + vi] - sh.values[vi]));
  }
  CHECK(worst <= 1e-10 * sup_norm(fh));
}

TEST_CASE("mild-form iteration") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(8);
  const VelocityGrid g = grid2(16);
  SpatialGrid s;
  s.d = 2;
  s.lo = make_vec(2, -2, -2);
  s.hi = make_vec(2, 2, 2);
  s.n = 4;
  const DistributionField f0 = tabulate_inhomogeneous(
      g, s, [](const Vec& x, const Vec& v) {
        return std::exp(-2.0 * norm2(x)) *
               (0.5 * maxwellian(2, 2.0, v - make_vec(2, 2, 0)) +
                0.5 * maxwellian(2, 2.0, v + make_vec(2, 2, 0)));
      });
  const double t = 0.1;

  // zero iterations reproduce the free flow
  const PicardResult base = picard_duhamel(f0, t, 0, 4, quad);
  const DistributionField flow = free_transport(f0, t);
  CHECK(sup_diff(base.f, flow) <= 1e-14);

  // updates contract on a short horizon and agree with the splitting
  // stepper at the leading order
  const PicardResult run = picard_duhamel(f0, t, 6, 8, quad);
  REQUIRE(run.update_history.size() == 6);
  CHECK(run.last_update <= run.update_history.front());
  CHECK(run.last_update <= 1e-4 * sup_norm(f0));

  DistributionField stepped = f0;
  for (int k = 0; k < 16; ++k)
    stepped = step_inhomogeneous(stepped, t / 16, quad);
  CHECK(sup_diff(run.f, stepped) <= 0.08 * sup_norm(f0));
}

TEST_CASE("entropy diagnostics") {
  const AngularQuadrature quad = AngularQuadrature::uniform_circle(16);
  const VelocityGrid g = grid2(24);

  // equilibrium: zero dissipation up to quadrature error
  const DistributionField m = maxwellian_field(g);
  const EntropyReport em = entropy_and_dissipation(m, quad);
  CHECK(std::abs(em.d) <= 1e-3);

  // out of equilibrium: strictly positive dissipation, and the entropy
  // decreases monotonically along the flow
  DistributionField f = two_bump_field(g);
  const EntropyReport e0 = entropy_and_dissipation(f, quad);
  CHECK(e0.d > 1e-3);
  double h_prev = e0.h;
  for (int k = 0; k < 20; ++k) {
    f = step_homogeneous(f, 0.01, quad);
    const double h = entropy_and_dissipation(f, quad).h;
    CHECK(h <= h_prev + 1e-8);
    h_prev = h;
  }

  DistributionField neg = m;
  neg.values[0] = -1e-3;
  CHECK_THROWS_AS(entropy_and_dissipation(neg, quad), ContractError);
}

TEST_CASE("moments and the matched Maxwellian") {
  const VelocityGrid g = grid2(32);
  const DistributionField zero = DistributionField::homogeneous(g);
  const Moments mz = moments(zero);
  CHECK(mz.mass == 0.0);
  CHECK(norm(mz.momentum) == 0.0);
  CHECK(mz.energy == 0.0);

  const Vec mean = make_vec(2, 0.5, -0.25);
  const DistributionField m = maxwellian_field(g, 2.0, mean);
  const Moments mm = moments(m);
  CHECK(mm.mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mm.momentum[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(mm.momentum[1] == doctest::Approx(-0.25).epsilon(1e-5));
  // energy = |u|^2/2 + d/(2 beta) per unit mass
  CHECK(mm.energy ==
        doctest::Approx(0.5 * norm2(mean) + 2.0 / (2.0 * 2.0)).epsilon(1e-4));

  // linearity of the moment map
  DistributionField sum = m;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] *= 3.0;
  CHECK(moments(sum).mass == doctest::Approx(3.0 * mm.mass).epsilon(1e-12));

  // matching reproduces mass, momentum and energy
  const DistributionField f = two_bump_field(g);
  const Moments mf = moments(f);
  const Moments mg = moments(matched_maxwellian(f));
  CHECK(mg.mass == doctest::Approx(mf.mass).epsilon(1e-3));
  CHECK(std::abs(mg.momentum[0] - mf.momentum[0]) <= 1e-3);
  CHECK(mg.energy == doctest::Approx(mf.energy).epsilon(1e-2));
}

TEST_CASE("field serialization round trip") {
  const VelocityGrid g = grid2(8, 4.0);
  SpatialGrid s;
  s.d = 2;
  s.lo = make_vec(2, -2, -1);
  s.hi = make_vec(2, 2, 1);
  s.n = 4;
  const DistributionField f = tabulate_inhomogeneous(
      g, s, [](const Vec& x, const Vec& v) {
        return (1.0 + x[0]) * maxwellian(2, 1.0, v);
      });
  const std::string dir =
      std::filesystem::temp_directory_path() / "kinlab_field_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/field.arr";
  write_field(f, path);
  const DistributionField rt = read_field(path);
  REQUIRE(rt.xgrid.has_value());
  CHECK(rt.vgrid == f.vgrid);
  CHECK(*rt.xgrid == *f.xgrid);
  REQUIRE(rt.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(rt.values[i] == f.values[i]);

  const DistributionField h = maxwellian_field(grid2(16));
  const std::string hpath = dir + "/hfield.arr";
  write_field(h, hpath);
  const DistributionField hrt = read_field(hpath);
  CHECK_FALSE(hrt.xgrid.has_value());
  CHECK(sup_diff(hrt, h) == 0.0);
  std::filesystem::remove_all(dir);
}

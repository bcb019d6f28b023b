// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "kinetic/phase.hpp"
#include "kinetic/rng.hpp"

using namespace kin;

TEST_CASE("model parameters store the derived intensity") {
  const ModelParams p2 = ModelParams::make(2, 1e-3, 1.0);
  CHECK(p2.mu == doctest::Approx(1e3).epsilon(1e-14));
  const ModelParams p3 = ModelParams::make(3, 1e-2, 2.0);
  CHECK(p3.mu == doctest::Approx(1e4).epsilon(1e-14));
  CHECK_THROWS_AS(ModelParams::make(4, 1e-3, 1.0), ContractError);
  CHECK_THROWS_AS(ModelParams::make(2, 0.0, 1.0), ContractError);
  CHECK_THROWS_AS(ModelParams::make(2, 1e-3, -1.0), ContractError);
}

TEST_CASE("configuration invariant checks") {
  const ModelParams p = ModelParams::make(2, 0.5, 1.0);
  Configuration cfg;
  cfg.particles.push_back({0, {make_vec(2, 0, 0), make_vec(2, 1, 0)}});
  cfg.particles.push_back({1, {make_vec(2, 1, 0), make_vec(2, 0, 0)}});
  CHECK_NOTHROW(check_configuration(cfg, p));

  Configuration dup = cfg;
  dup.particles[1].id = 0;
  CHECK_THROWS_AS(check_configuration(dup, p), ContractError);

  Configuration close = cfg;
  close.particles[1].z.x = make_vec(2, 0.4, 0);  // below the diameter
  CHECK_THROWS_AS(check_configuration(close, p), ContractError);

  Configuration inf_v = cfg;
  inf_v.particles[0].z.v[0] = INFINITY;
  CHECK_THROWS_AS(check_configuration(inf_v, p), ContractError);
}

TEST_CASE("scattering: head-on exchange") {
  const auto [vp, vsp] = scatter(make_vec(2, 1, 0), make_vec(2, -1, 0),
                                 make_vec(2, 1, 0));
  CHECK(vp[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(vp[1] == 0.0);
  CHECK(vsp[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vsp[1] == 0.0);
}

TEST_CASE("scattering: grazing contact leaves velocities unchanged") {
  // (v - v*) orthogonal to omega
  const Vec v = make_vec(2, 1, 2), vs = make_vec(2, 1, -1);
  const Vec omega = make_vec(2, 1, 0);  // v - v* = (0, 3), orthogonal
  const auto [vp, vsp] = scatter(v, vs, omega);
  CHECK(vp == v);
  CHECK(vsp == vs);
}

TEST_CASE("scattering: oblique 45-degree impact") {
  const double r = std::sqrt(0.5);
  const auto [vp, vsp] =
      scatter(make_vec(2, 1, 0), make_vec(2, 0, 0), make_vec(2, r, r));
  CHECK(vp[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(vp[1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(vsp[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(vsp[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm2(vp) + norm2(vsp) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("scattering rejects a non-unit direction") {
  CHECK_THROWS_AS(
      scatter(make_vec(2, 1, 0), make_vec(2, 0, 0), make_vec(2, 1, 1)),
      ContractError);
}

TEST_CASE("collision invariants: defects of valid and corrupted pairs") {
  const std::pair<Vec, Vec> head_pre{make_vec(2, 1, 0), make_vec(2, -1, 0)};
  const auto head_post = scatter(head_pre.first, head_pre.second,
                                 make_vec(2, 1, 0));
  const InvariantDefect d1 = collision_invariant_defect(head_pre, head_post);
  CHECK(norm(d1.momentum) == 0.0);
  CHECK(d1.energy == 0.0);

  const double r = std::sqrt(0.5);
  const std::pair<Vec, Vec> obl_pre{make_vec(2, 1, 0), make_vec(2, 0, 0)};
  const auto obl_post = scatter(obl_pre.first, obl_pre.second, make_vec(2, r, r));
  const InvariantDefect d2 = collision_invariant_defect(obl_pre, obl_post);
  CHECK(norm(d2.momentum) <= 1e-15);
  CHECK(std::abs(d2.energy) <= 1e-15);

  // corrupted post pair duplicates the first velocity
  const InvariantDefect d3 = collision_invariant_defect(
      {make_vec(2, 1, 0), make_vec(2, 0, 0)},
      {make_vec(2, 1, 0), make_vec(2, 1, 0)});
  CHECK(d3.energy == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("maxwellian: value, monotonicity, normalization") {
  CHECK(maxwellian(2, 1.0, make_vec(2, 0, 0)) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(maxwellian(2, 0.0, make_vec(2, 0, 0)), ContractError);

  double prev = maxwellian(2, 0.7, make_vec(2, 0, 0));
  for (double s = 0.5; s < 6.0; s += 0.5) {
    const double cur = maxwellian(2, 0.7, make_vec(2, s, 0));
    CHECK(cur < prev);
    CHECK(cur > 0.0);
    prev = cur;
  }

  // midpoint quadrature of M_1 over [-8, 8]^2
  const int n = 400;
  const double hgrid = 16.0 / n;
  double mass = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec v =
          make_vec(2, -8.0 + (i + 0.5) * hgrid, -8.0 + (j + 0.5) * hgrid);
      mass += maxwellian(2, 1.0, v) * hgrid * hgrid;
    }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("maxwellian normalization error decays second order") {
  auto quad_mass = [](int n) {
    const double hgrid = 16.0 / n;
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec v =
            make_vec(2, -8.0 + (i + 0.5) * hgrid, -8.0 + (j + 0.5) * hgrid);
        mass += maxwellian(2, 1.0, v) * hgrid * hgrid;
      }
    return std::abs(mass - 1.0);
  };
  // coarse grids, where discretization still dominates rounding
  const double e1 = quad_mass(4), e2 = quad_mass(8);
  CHECK(e1 > 1e-10);
  CHECK(e2 <= e1 / 2.0);
  CHECK(quad_mass(64) <= 1e-12);
}

namespace {

std::vector<PhaseNode> maxwellian_grid(double beta, double scale = 1.0) {
  std::vector<PhaseNode> nodes;
  for (int i = -30; i <= 30; ++i)
    for (int j = -30; j <= 30; ++j) {
      PhaseNode n;
      n.x = make_vec(2, 0, 0);
      n.v = make_vec(2, 0.2 * i, 0.2 * j);
      n.f = scale * maxwellian(2, beta, n.v);
      nodes.push_back(n);
    }
  return nodes;
}

}  // namespace

TEST_CASE("weighted sup norm") {
  CHECK(weighted_sup_norm({}, 1.0) == 0.0);
  std::vector<PhaseNode> zero = maxwellian_grid(1.0, 0.0);
  CHECK(weighted_sup_norm(zero, 1.0) == 0.0);

  // weight exactly cancels the Gaussian: every node attains the prefactor
  const auto nodes = maxwellian_grid(1.0);
  CHECK(weighted_sup_norm(nodes, 1.0) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));

  // f = M_{2beta} with weight beta: independent grid-scan oracle
  const double beta = 1.0;
  const auto sharp = maxwellian_grid(2.0 * beta);
  double oracle = 0.0;
  for (const auto& n : sharp)
    oracle = std::max(oracle, std::abs(n.f) * std::exp(0.5 * beta * norm2(n.v)));
  CHECK(weighted_sup_norm(sharp, beta) == doctest::Approx(oracle).epsilon(1e-14));
  // the max sits at v = 0 with value (2beta/2pi)^{d/2} = (beta/pi)^{d/2}
  CHECK(oracle == doctest::Approx(std::pow(beta / M_PI, 1.0)).epsilon(1e-12));
}

TEST_CASE("lattice-summed weighted norm") {
  CHECK(l_inf1_norm({}, 2, 1.0) == 0.0);

  // one spatial node at the origin times M_beta over a velocity grid
  std::vector<PhaseNode> nodes;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      PhaseNode n;
      n.x = make_vec(2, 0.25, 0.25);
      n.v = make_vec(2, 0.3 * i, 0.3 * j);
      n.f = maxwellian(2, 1.0, n.v);
      nodes.push_back(n);
    }
  // independent oracle: enumerate lattice points within distance 1 of the
  // single spatial location; each contributes the same weighted sup
  int n_cells = 0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      if (norm(make_vec(2, 0.25 - i, 0.25 - j)) <= 1.0) ++n_cells;
  CHECK(n_cells == 3);  // (0,0), (1,0), (0,1)
  const double per_cell = 1.0 / (2.0 * M_PI);
  const double got = l_inf1_norm(nodes, 2, 1.0);
  CHECK(got == doctest::Approx(n_cells * per_cell).epsilon(1e-12));

  // homogeneity
  std::vector<PhaseNode> doubled = nodes;
  for (auto& n : doubled) n.f *= 2.0;
  CHECK(l_inf1_norm(doubled, 2, 1.0) == doctest::Approx(2.0 * got).epsilon(1e-14));
}

TEST_CASE("property: scattering is an involution") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec v = make_vec(2, rng.normal(), rng.normal());
    const Vec vs = make_vec(2, rng.normal(), rng.normal());
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    const Vec om = make_vec(2, std::cos(th), std::sin(th));
    const auto once = scatter(v, vs, om);
    const auto twice = scatter(once.first, once.second, om);
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(twice.first[a] - v[a]) <= 1e-14);
      CHECK(std::abs(twice.second[a] - vs[a]) <= 1e-14);
    }
  }
}

TEST_CASE("property: conservation over random triples (d = 2 and 3)") {
  RngStream rng(12, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 20000; ++trial) {
    const int d = (trial % 2 == 0) ? 2 : 3;
    const Vec v = make_vec(d, rng.normal(), rng.normal(), rng.normal());
    const Vec vs = make_vec(d, rng.normal(), rng.normal(), rng.normal());
    Vec om = make_vec(d, rng.normal(), rng.normal(), rng.normal());
    om *= 1.0 / norm(om);
    const auto post = scatter(v, vs, om);
    const InvariantDefect defect = collision_invariant_defect({v, vs}, post);
    worst = std::max(worst, norm(defect.momentum));
    worst = std::max(worst, std::abs(defect.energy));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("property: the pair map preserves uniform measure statistically") {
  // push uniform samples on [-1,1]^4 through (v, v*) -> (v', v*') at fixed
  // omega and compare the count in a sub-box before and after
  RngStream rng(13, 0);
  const Vec om = make_vec(2, std::cos(0.3), std::sin(0.3));
  const int n = 100000;
  // the pair map is orthogonal on (v, v*), so a centered ball is an
  // invariant region whose expected occupancy must not change
  auto in_subbox = [](const Vec& a, const Vec& b) {
    return norm2(a) + norm2(b) < 1.0;
  };
  int before = 0, after = 0;
  for (int i = 0; i < n; ++i) {
    const Vec v = make_vec(2, rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec vs = make_vec(2, rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (in_subbox(v, vs)) ++before;
    const auto post = scatter(v, vs, om);
    if (in_subbox(post.first, post.second)) ++after;
  }
  const double p = double(before) / n;
  const double se = std::sqrt(p * (1.0 - p) * n);
  CHECK(std::abs(double(after) - double(before)) <= 3.0 * se + 1.0);
}

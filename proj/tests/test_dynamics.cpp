// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kinetic/dynamics.hpp"
#include "kinetic/sampler.hpp"

using namespace kin;

namespace {

Configuration two_body_head_on() {
  Configuration cfg;
  cfg.particles.push_back({0, {make_vec(2, 0, 0), make_vec(2, 1, 0)}});
  cfg.particles.push_back({1, {make_vec(2, 3, 0), make_vec(2, -1, 0)}});
  return cfg;
}

Configuration sampled_gas(double eps, std::uint64_t stream,
                          double half_width = 1.0) {
  const ModelParams params = ModelParams::make(2, eps, 1.0);
  InitialDataSpec spec;
  spec.kind = InitialKind::UniformBoxXMaxwellianV;
  spec.box_lo = make_vec(2, -half_width, -half_width);
  spec.box_hi = make_vec(2, half_width, half_width);
  spec.beta = 1.0;
  RngStream rng(2024, stream);
  return sample_configuration(params, spec, rng);
}

struct Totals {
  Vec momentum;
  double energy = 0.0;
};

Totals totals(const Configuration& cfg) {
  Totals t;
  for (const auto& p : cfg.particles) {
    t.momentum += p.z.v;
    t.energy += 0.5 * norm2(p.z.v);
  }
  return t;
}

}  // namespace

TEST_CASE("collision prediction") {
  // collinear approach with gap 3 closing at rate 2, diameter 1
  const PhasePoint a{make_vec(2, 0, 0), make_vec(2, 1, 0)};
  const PhasePoint b{make_vec(2, 3, 0), make_vec(2, -1, 0)};
  const auto t = predict_collision(a, b, 1.0);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(1.0).epsilon(1e-14));

  // parallel velocities never meet
  const PhasePoint c{make_vec(2, 0, 0), make_vec(2, 1, 0)};
  const PhasePoint d{make_vec(2, 0, 2), make_vec(2, 1, 0)};
  CHECK_FALSE(predict_collision(c, d, 1.0).has_value());

  // closest approach at perpendicular distance 1.5 > 1
  const PhasePoint e{make_vec(2, 0, 0), make_vec(2, 1, 0)};
  const PhasePoint f{make_vec(2, 2, 1.5), make_vec(2, 0, 0)};
  CHECK_FALSE(predict_collision(e, f, 1.0).has_value());

  // receding pair
  const PhasePoint g{make_vec(2, 0, 0), make_vec(2, -1, 0)};
  const PhasePoint h{make_vec(2, 3, 0), make_vec(2, 1, 0)};
  CHECK_FALSE(predict_collision(g, h, 1.0).has_value());

  // overlapping input violates the contract
  const PhasePoint i{make_vec(2, 0, 0), make_vec(2, 1, 0)};
  const PhasePoint j{make_vec(2, 0.5, 0), make_vec(2, 0, 0)};
  CHECK_THROWS_AS(predict_collision(i, j, 1.0), ContractError);
}

TEST_CASE("single particle: free flight, empty log") {
  Configuration cfg;
  cfg.particles.push_back({0, {make_vec(2, 0.5, -0.25), make_vec(2, 2, 1)}});
  const ModelParams params = ModelParams::make(2, 0.1, 1.0);
  const EventLog log = run(cfg, 3.0, params);
  CHECK(log.events.empty());
  const Configuration fin = evolve_to(log, 3.0);
  CHECK(fin.particles[0].z.x[0] == doctest::Approx(6.5).epsilon(1e-14));
  CHECK(fin.particles[0].z.x[1] == doctest::Approx(2.75).epsilon(1e-14));
}

TEST_CASE("two-body head-on: one event, exchange, replay points") {
  const ModelParams params = ModelParams::make(2, 1.0, 1.0);
  const EventLog log = run(two_body_head_on(), 2.0, params);
  REQUIRE(log.events.size() == 1);
  const CollisionEvent& ev = log.events[0];
  CHECK(ev.t == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev.i == 0);
  CHECK(ev.j == 1);
  CHECK(ev.v_post.first[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ev.v_post.second[0] == doctest::Approx(1.0).epsilon(1e-13));

  // replay at t = 1.5: both particles moved back out for 0.5
  const Configuration mid = evolve_to(log, 1.5);
  CHECK(mid.particles[0].z.x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.particles[1].z.x[0] == doctest::Approx(2.5).epsilon(1e-12));

  // boundary replays
  const Configuration at0 = evolve_to(log, 0.0);
  CHECK(at0.particles[0].z.x[0] == 0.0);
  const Configuration at2 = evolve_to(log, 2.0);
  CHECK(at2.particles[0].z.x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(evolve_to(log, 2.5), ContractError);

  CHECK(replay_defect(log) <= 1e-12);
}

TEST_CASE("velocity reversal") {
  Configuration cfg = two_body_head_on();
  const Configuration rev = reverse_velocities(cfg);
  CHECK(rev.particles[0].z.v[0] == -1.0);
  CHECK(rev.particles[0].z.x == cfg.particles[0].z.x);
  const Configuration twice = reverse_velocities(rev);
  CHECK(twice.particles[0].z.v == cfg.particles[0].z.v);
  CHECK(twice.particles[1].z.v == cfg.particles[1].z.v);
}

TEST_CASE("mean free time estimator") {
  EventLog log;
  log.params = ModelParams::make(2, 0.1, 1.0);
  log.t_end = 1.0;
  for (int i = 0; i < 10; ++i)
    log.initial.particles.push_back(
        {std::uint32_t(i), {make_vec(2, double(i), 0), make_vec(2, 0, 0)}});
  CHECK_FALSE(mean_free_time_estimate(log).has_value());
  log.events.resize(5);
  const auto est = mean_free_time_estimate(log);
  REQUIRE(est.has_value());
  CHECK(*est == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("N-body run: conservation, exclusion, replay, determinism") {
  const ModelParams params = ModelParams::make(2, 5e-3, 1.0);  // mu = 200
  const Configuration cfg = sampled_gas(5e-3, 0);
  const EventLog log = run(cfg, 1.0, params);
  CHECK(log.events.size() > 20);  // a dilute gas at mu = 200 does collide

  const Totals before = totals(cfg);
  const Totals after = totals(evolve_to(log, 1.0));
  const double scale = std::max(1.0, std::abs(before.energy));
  CHECK(norm(after.momentum - before.momentum) <= 1e-10 * scale);
  CHECK(std::abs(after.energy - before.energy) <= 1e-10 * scale);

  for (double t : {0.0, 0.3, 0.77, 1.0}) {
    const Configuration snap = evolve_to(log, t);
    CHECK(min_pair_distance(snap) >= params.eps * (1.0 - 1e-9));
  }

  CHECK(replay_defect(log) <= 1e-12);

  // events strictly ordered and inside the window
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    CHECK(log.events[e].t >= 0.0);
    CHECK(log.events[e].t <= 1.0);
    if (e > 0) CHECK(log.events[e].t >= log.events[e - 1].t);
    CHECK(std::abs(norm(log.events[e].omega) - 1.0) <= 1e-12);
  }

  // determinism: a second identical run matches event for event
  const EventLog log2 = run(cfg, 1.0, params);
  REQUIRE(log2.events.size() == log.events.size());
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    CHECK(log2.events[e].t == log.events[e].t);
    CHECK(log2.events[e].i == log.events[e].i);
    CHECK(log2.events[e].j == log.events[e].j);
    CHECK(log2.events[e].v_post == log.events[e].v_post);
  }
}

TEST_CASE("reversibility at small scale") {
  const ModelParams params = ModelParams::make(2, 1e-2, 1.0);  // mu = 100
  const Configuration cfg = sampled_gas(1e-2, 1);
  const double t_span = 0.5;
  const EventLog fwd = run(cfg, t_span, params);
  CHECK(fwd.events.size() > 0);
  Configuration turned = reverse_velocities(evolve_to(fwd, t_span));
  turned.t = 0.0;  // restart the clock for the reversed leg
  const EventLog back = run(turned, t_span, params);
  const Configuration recovered = reverse_velocities(evolve_to(back, t_span));

  double vscale = 0.0;
  for (const auto& p : cfg.particles) vscale = std::max(vscale, norm(p.z.v));
  double worst = 0.0;
  REQUIRE(recovered.size() == cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    worst = std::max(
        worst, norm(recovered.particles[i].z.x - cfg.particles[i].z.x));
    worst = std::max(
        worst, norm(recovered.particles[i].z.v - cfg.particles[i].z.v));
  }
  CHECK(worst / std::max(1.0, vscale) <= 1e-6);
}

TEST_CASE("event log serialization round trip") {
  const ModelParams params = ModelParams::make(2, 1e-2, 1.0);
  const Configuration cfg = sampled_gas(1e-2, 2);
  EventLog log = run(cfg, 0.5, params);
  log.seed = 2024;
  log.stream = 2;

  const std::string dir = std::filesystem::temp_directory_path() /
                          "kinlab_dyn_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/log.klev";
  write_event_log(log, path);
  const EventLog rt = read_event_log(path);

  CHECK(rt.params.eps == log.params.eps);
  CHECK(rt.seed == log.seed);
  CHECK(rt.stream == log.stream);
  CHECK(rt.t_end == log.t_end);
  REQUIRE(rt.initial.size() == log.initial.size());
  for (std::size_t i = 0; i < log.initial.size(); ++i) {
    CHECK(rt.initial.particles[i].z.x == log.initial.particles[i].z.x);
    CHECK(rt.initial.particles[i].z.v == log.initial.particles[i].z.v);
  }
  REQUIRE(rt.events.size() == log.events.size());
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    CHECK(rt.events[e].t == log.events[e].t);
    CHECK(rt.events[e].i == log.events[e].i);
    CHECK(rt.events[e].j == log.events[e].j);
    CHECK(rt.events[e].omega == log.events[e].omega);
    CHECK(rt.events[e].v_pre == log.events[e].v_pre);
    CHECK(rt.events[e].v_post == log.events[e].v_post);
  }

  // byte-identical re-serialization (manifest reproducibility rests on it)
  const std::string path2 = dir + "/log2.klev";
  write_event_log(rt, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string b1((std::istreambuf_iterator<char>(f1)),
                 std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)),
                 std::istreambuf_iterator<char>());
  CHECK(b1 == b2);

  // CSV export has a header row and one row per event
  const std::string csv = dir + "/log.csv";
  write_event_log_csv(log, csv);
  std::ifstream cs(csv);
  std::string line;
  REQUIRE(std::getline(cs, line));
  CHECK(line.find("t") != std::string::npos);
  std::size_t n_rows = 0;
  while (std::getline(cs, line))
    if (!line.empty()) ++n_rows;
  CHECK(n_rows == log.events.size());

  std::filesystem::remove_all(dir);
}

TEST_CASE("mean free time stabilizes across the scaling") {
  // the Boltzmann-Grad scaling keeps the mean free time order one
  auto mft_at = [](double eps, int members) {
    const ModelParams params = ModelParams::make(2, eps, 1.0);
    double acc = 0.0;
    int counted = 0;
    for (int m = 0; m < members; ++m) {
      const Configuration cfg = sampled_gas(eps, 100 + std::uint64_t(m));
      const EventLog log = run(cfg, 1.0, params);
      const auto est = mean_free_time_estimate(log);
      if (est) {
        acc += *est;
        ++counted;
      }
    }
    REQUIRE(counted > 0);
    return acc / counted;
  };
  const double coarse = mft_at(1e-2, 12);
  const double fine = mft_at(3e-3, 8);
  CHECK(std::abs(fine - coarse) / coarse <= 0.2);
}

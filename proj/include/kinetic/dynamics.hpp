// SPDX-License-Identifier: Apache-2.0
//
// Exact event-driven hard-sphere flow on the open domain: free flight plus
// specular reflection at distance eps, producing a complete, replayable
// event log.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinetic/phase.hpp"

namespace kin {

struct CollisionEvent {
  double t = 0.0;
  std::uint32_t i = 0, j = 0;  // i < j
  Vec omega;                   // (x_i - x_j)/eps at contact
  std::pair<Vec, Vec> v_pre;
  std::pair<Vec, Vec> v_post;
};

struct EventLog {
  ModelParams params;
  Configuration initial;
  std::vector<CollisionEvent> events;
  double t_end = 0.0;
  // seed provenance, recorded in the serialized header
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Smallest t >= 0 with |dx + dv t| = eps and approach condition
// (dx + dv t) . dv < 0; nullopt when the pair misses or recedes.
// Grazing roots (normal relative speed below 1e-12) are not reported.
// Throws on overlapping input (distance < eps(1 - 1e-12)).
std::optional<double> predict_collision(const PhasePoint& p_i,
                                        const PhasePoint& p_j, double eps);

struct RunOptions {
  // Events per pair within 1e-12 mean-free-time triggering the Zeno guard.
  int zeno_max_pair_events = 64;
  // Target mean cell occupancy when choosing the cell size.
  double target_occupancy = 3.0;
};

EventLog run(const Configuration& config, double t_end,
             const ModelParams& params, const RunOptions& opts = {});

// Configuration at time t in [t_initial, t_end], replaying recorded events
// then free-flighting.
Configuration evolve_to(const EventLog& log, double t);

Configuration reverse_velocities(Configuration config);

// (particles x elapsed time) / (2 x collisions); nullopt when no events.
std::optional<double> mean_free_time_estimate(const EventLog& log);

// Replays initial + events by free flight + scatter (with omega recomputed
// from replayed positions) and returns the max componentwise defect
// against the recorded post-collision velocities.
double replay_defect(const EventLog& log);

// --- serialization (little-endian binary; see docs in dynamics_io.cpp) ---
void write_event_log(const EventLog& log, const std::string& path);
EventLog read_event_log(const std::string& path);
void write_event_log_csv(const EventLog& log, const std::string& path);

}  // namespace kin

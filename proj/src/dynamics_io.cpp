// SPDX-License-Identifier: Apache-2.0
//
// EventLog on disk. Binary layout (little-endian throughout):
//   magic "KLEV", u32 version
//   u32 d, f64 eps, f64 beta
//   f64 t_initial, f64 t_end, u64 seed, u64 stream
//   u64 N, u64 n_events
//   N initial-particle records:   d x f64 position, d x f64 velocity
//   n_events event records:       f64 t, u32 i, u32 j,
//                                 d x f64 omega, 2d x f64 v_pre, 2d x f64 v_post
// The CSV export is one headered row per event.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kinetic/dynamics.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace kin {

namespace {

constexpr char kMagic[4] = {'K', 'L', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw RuntimeError("event log: truncated file");
  return v;
}

void put_vec(std::ostream& os, const Vec& v, int d) {
  for (int a = 0; a < d; ++a) put(os, v[a]);
}

Vec get_vec(std::istream& is, int d) {
  Vec v;
  for (int a = 0; a < d; ++a) v[a] = get<double>(is);
  return v;
}

}  // namespace

void write_event_log(const EventLog& log, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw RuntimeError("event log: cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, std::uint32_t(log.params.d));
  put(os, log.params.eps);
  put(os, log.params.beta);
  put(os, log.initial.t);
  put(os, log.t_end);
  put(os, log.seed);
  put(os, log.stream);
  put(os, std::uint64_t(log.initial.size()));
  put(os, std::uint64_t(log.events.size()));
  const int d = log.params.d;
  for (const auto& p : log.initial.particles) {
    put_vec(os, p.z.x, d);
    put_vec(os, p.z.v, d);
  }
  for (const auto& e : log.events) {
    put(os, e.t);
    put(os, e.i);
    put(os, e.j);
    put_vec(os, e.omega, d);
    put_vec(os, e.v_pre.first, d);
    put_vec(os, e.v_pre.second, d);
    put_vec(os, e.v_post.first, d);
    put_vec(os, e.v_post.second, d);
  }
  if (!os) throw RuntimeError("event log: write failed for " + path);
}

EventLog read_event_log(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeError("event log: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw RuntimeError("event log: bad magic in " + path);
  if (get<std::uint32_t>(is) != kVersion)
    throw RuntimeError("event log: unsupported version in " + path);
  const int d = int(get<std::uint32_t>(is));
  const double eps = get<double>(is);
  const double beta = get<double>(is);
  EventLog log;
  log.params = ModelParams::make(d, eps, beta);
  log.initial.t = get<double>(is);
  log.t_end = get<double>(is);
  log.seed = get<std::uint64_t>(is);
  log.stream = get<std::uint64_t>(is);
  const auto n = get<std::uint64_t>(is);
  const auto m = get<std::uint64_t>(is);
  log.initial.particles.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    log.initial.particles[k].id = std::uint32_t(k);
    log.initial.particles[k].z.x = get_vec(is, d);
    log.initial.particles[k].z.v = get_vec(is, d);
  }
  log.events.resize(m);
  for (auto& e : log.events) {
    e.t = get<double>(is);
    e.i = get<std::uint32_t>(is);
    e.j = get<std::uint32_t>(is);
    e.omega = get_vec(is, d);
    e.v_pre.first = get_vec(is, d);
    e.v_pre.second = get_vec(is, d);
    e.v_post.first = get_vec(is, d);
    e.v_post.second = get_vec(is, d);
  }
  return log;
}

void write_event_log_csv(const EventLog& log, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw RuntimeError("event log: cannot open " + path + " for writing");
  const int d = log.params.d;
  const char* ax = "xyz";
  os << "t,i,j";
  for (int a = 0; a < d; ++a) os << ",omega_" << ax[a];
  for (const char* who : {"i", "j"})
    for (int a = 0; a < d; ++a) os << ",v_pre_" << who << "_" << ax[a];
  for (const char* who : {"i", "j"})
    for (int a = 0; a < d; ++a) os << ",v_post_" << who << "_" << ax[a];
  os << "\n";
  os.precision(17);
  for (const auto& e : log.events) {
    os << e.t << "," << e.i << "," << e.j;
    for (int a = 0; a < d; ++a) os << "," << e.omega[a];
    for (const Vec* v : {&e.v_pre.first, &e.v_pre.second, &e.v_post.first,
                         &e.v_post.second})
      for (int a = 0; a < d; ++a) os << "," << (*v)[a];
    os << "\n";
  }
}

}  // namespace kin

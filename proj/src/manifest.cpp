// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kinetic/harness.hpp"

namespace kin {

const char* const kVersionString = "kinlab 1.0.0";

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeError("cannot open for checksum: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!is) break;
  }
  return h;
}

namespace {

// multi-line blocks are stored with a line-count prefix so the manifest
// round-trips the embedded config snapshot exactly
void put_block(std::ostream& os, const std::string& key, const std::string& text) {
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  if (!text.empty() && text.back() != '\n') ++lines;
  os << key << " " << lines << "\n" << text;
  if (!text.empty() && text.back() != '\n') os << "\n";
}

}  // namespace

void RunManifest::write(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw RuntimeError("cannot open for writing: " + tmp);
    os << "manifest-version 1\n";
    os << "version " << version << "\n";
    os << "base-seed " << base_seed << "\n";
    os << "wall-seconds " << wall_seconds << "\n";
    os << "member-streams";
    for (auto s : member_streams) os << " " << s;
    os << "\n";
    os << "failed-members";
    for (auto m : failed_members) os << " " << m;
    os << "\n";
    os << "artifacts " << artifact_checksums.size() << "\n";
    for (const auto& [name, sum] : artifact_checksums) {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)sum);
      os << "  " << hex << " " << name << "\n";
    }
    put_block(os, "config", config_text);
    if (!os) throw RuntimeError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw RuntimeError("cannot move into place: " + path);
}

RunManifest RunManifest::read(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw RuntimeError("cannot open manifest: " + path);
  RunManifest m;
  std::string line;
  auto fail = [&](const std::string& why) -> RuntimeError {
    return RuntimeError("malformed manifest " + path + ": " + why);
  };
  if (!std::getline(is, line) || line != "manifest-version 1")
    throw fail("bad header");
  if (!std::getline(is, line) || line.rfind("version ", 0) != 0)
    throw fail("missing version");
  m.version = line.substr(8);
  if (!std::getline(is, line) || line.rfind("base-seed ", 0) != 0)
    throw fail("missing base-seed");
  m.base_seed = std::stoull(line.substr(10));
  if (!std::getline(is, line) || line.rfind("wall-seconds ", 0) != 0)
    throw fail("missing wall-seconds");
  m.wall_seconds = std::stod(line.substr(13));
  if (!std::getline(is, line) || line.rfind("member-streams", 0) != 0)
    throw fail("missing member-streams");
  {
    std::istringstream ls(line.substr(14));
    std::uint64_t v;
    while (ls >> v) m.member_streams.push_back(v);
  }
  if (!std::getline(is, line) || line.rfind("failed-members", 0) != 0)
    throw fail("missing failed-members");
  {
    std::istringstream ls(line.substr(14));
    int v;
    while (ls >> v) m.failed_members.push_back(v);
  }
  if (!std::getline(is, line) || line.rfind("artifacts ", 0) != 0)
    throw fail("missing artifacts");
  const std::size_t n_art = std::stoul(line.substr(10));
  for (std::size_t i = 0; i < n_art; ++i) {
    if (!std::getline(is, line)) throw fail("truncated artifact list");
    std::istringstream ls(line);
    std::string hex, name;
    if (!(ls >> hex >> name)) throw fail("bad artifact line");
    m.artifact_checksums[name] = std::stoull(hex, nullptr, 16);
  }
  if (!std::getline(is, line) || line.rfind("config ", 0) != 0)
    throw fail("missing config block");
  const std::size_t n_lines = std::stoul(line.substr(7));
  std::ostringstream cfg;
  for (std::size_t i = 0; i < n_lines; ++i) {
    if (!std::getline(is, line)) throw fail("truncated config block");
    cfg << line << "\n";
  }
  m.config_text = cfg.str();
  return m;
}

}  // namespace kin

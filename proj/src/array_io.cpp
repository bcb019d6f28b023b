// SPDX-License-Identifier: Apache-2.0

#include "kinetic/array_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "kinetic/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace kin {

namespace {

constexpr char kMagic[4] = {'K', 'L', 'D', 'A'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, std::uint32_t(s.size()));
  os.write(s.data(), std::streamsize(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string get_str(std::istream& is) {
  const std::uint32_t n = get_u32(is);
  if (n > (1u << 20)) throw RuntimeError("dense array: oversized string field");
  std::string s(n, '\0');
  is.read(s.data(), std::streamsize(n));
  return s;
}

}  // namespace

std::uint64_t DenseArray::n_entries() const {
  std::uint64_t n = 1;
  for (const auto& ax : axes) n *= ax.extent;
  return axes.empty() ? 0 : n;
}

void DenseArray::validate() const {
  if (axes.empty()) throw ContractError("dense array: no axes");
  for (const auto& ax : axes)
    if (ax.extent == 0) throw ContractError("dense array: zero axis extent");
  if (data.size() != n_entries())
    throw ContractError("dense array: payload size does not match axes");
}

void write_dense_array(const DenseArray& a, const std::string& path) {
  a.validate();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw RuntimeError("cannot open for writing: " + tmp);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, std::uint32_t(a.axes.size()));
    for (const auto& ax : a.axes) {
      put_str(os, ax.name);
      put_u64(os, ax.extent);
      put_f64(os, ax.lo);
      put_f64(os, ax.hi);
    }
    put_u32(os, std::uint32_t(a.meta.size()));
    for (const auto& [k, v] : a.meta) {
      put_str(os, k);
      put_str(os, v);
    }
    os.write(reinterpret_cast<const char*>(a.data.data()),
             std::streamsize(a.data.size() * sizeof(double)));
    if (!os) throw RuntimeError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw RuntimeError("cannot move into place: " + path);
}

DenseArray read_dense_array(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeError("cannot open for reading: " + path);
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kMagic, 4))
    throw RuntimeError("not a dense array file: " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kVersion)
    throw RuntimeError("unsupported dense array version in " + path);
  DenseArray a;
  const std::uint32_t n_axes = get_u32(is);
  if (n_axes == 0 || n_axes > 64)
    throw RuntimeError("dense array: bad axis count in " + path);
  for (std::uint32_t i = 0; i < n_axes; ++i) {
    ArrayAxis ax;
    ax.name = get_str(is);
    ax.extent = get_u64(is);
    ax.lo = get_f64(is);
    ax.hi = get_f64(is);
    a.axes.push_back(std::move(ax));
  }
  const std::uint32_t n_meta = get_u32(is);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = get_str(is);
    a.meta[k] = get_str(is);
  }
  if (!is) throw RuntimeError("truncated dense array header: " + path);
  const std::uint64_t n = a.n_entries();
  if (n > (std::uint64_t(1) << 30))
    throw RuntimeError("dense array too large: " + path);
  a.data.resize(n);
  is.read(reinterpret_cast<char*>(a.data.data()),
          std::streamsize(n * sizeof(double)));
  if (!is) throw RuntimeError("truncated dense array payload: " + path);
  a.validate();
  return a;
}

}  // namespace kin

// SPDX-License-Identifier: Apache-2.0
//
// A minimal binary container for dense float64 arrays with named axes and
// string metadata, shared by distribution fields and phase histograms so
// readers can validate shapes and axis ranges before touching the payload.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kin {

struct ArrayAxis {
  std::string name;
  std::uint64_t extent = 0;
  double lo = 0.0, hi = 0.0;  // physical range covered by the axis

  bool operator==(const ArrayAxis& o) const {
    return name == o.name && extent == o.extent && lo == o.lo && hi == o.hi;
  }
};

struct DenseArray {
  std::vector<ArrayAxis> axes;  // row-major, first axis slowest
  std::map<std::string, std::string> meta;
  std::vector<double> data;

  std::uint64_t n_entries() const;
  void validate() const;  // extents > 0, data size matches
};

// Format: "KLDA" magic, u32 version (1), u32 axis count, per axis a
// length-prefixed name + u64 extent + f64 lo + f64 hi, u32 metadata count,
// per entry length-prefixed key and value, then the f64 payload. All
// little-endian. Writes go to a temporary and are renamed into place.
void write_dense_array(const DenseArray& a, const std::string& path);
DenseArray read_dense_array(const std::string& path);

}  // namespace kin

// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "kinetic/array_io.hpp"
#include "kinetic/estimators.hpp"

namespace kin {

namespace {

double meta_num(const DenseArray& a, const std::string& key) {
  auto it = a.meta.find(key);
  if (it == a.meta.end())
    throw RuntimeError("histogram file: missing metadata key '" + key + "'");
  return std::strtod(it->second.c_str(), nullptr);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_histogram(const PhaseHistogram& h, const std::string& path) {
  h.spec.validate();
  DenseArray a;
  const char* names[3] = {"cell-a", "cell-b", "cell-c"};
  for (int k = 0; k < h.order; ++k)
    a.axes.push_back(
        {names[k], std::uint64_t(h.spec.n_cells()), 0.0,
         double(h.spec.n_cells())});
  a.meta["kind"] = "phase-histogram";
  a.meta["order"] = std::to_string(h.order);
  a.meta["d"] = std::to_string(h.spec.d);
  a.meta["nx"] = std::to_string(h.spec.nx);
  a.meta["nv"] = std::to_string(h.spec.nv);
  a.meta["overflow"] = fmt(h.overflow_weight);
  for (int ax = 0; ax < h.spec.d; ++ax) {
    const std::string s = std::to_string(ax);
    a.meta["x_lo" + s] = fmt(h.spec.x_lo[ax]);
    a.meta["x_hi" + s] = fmt(h.spec.x_hi[ax]);
    a.meta["v_lo" + s] = fmt(h.spec.v_lo[ax]);
    a.meta["v_hi" + s] = fmt(h.spec.v_hi[ax]);
  }
  a.data = h.values;
  write_dense_array(a, path);
}

PhaseHistogram read_histogram(const std::string& path) {
  const DenseArray a = read_dense_array(path);
  auto kind = a.meta.find("kind");
  if (kind == a.meta.end() || kind->second != "phase-histogram")
    throw RuntimeError("not a phase histogram file: " + path);
  PhaseHistogram h;
  h.order = int(meta_num(a, "order"));
  if (h.order < 1 || h.order > 3)
    throw RuntimeError("histogram file: bad order");
  h.spec.d = int(meta_num(a, "d"));
  h.spec.nx = int(meta_num(a, "nx"));
  h.spec.nv = int(meta_num(a, "nv"));
  h.overflow_weight = meta_num(a, "overflow");
  for (int ax = 0; ax < h.spec.d; ++ax) {
    const std::string s = std::to_string(ax);
    h.spec.x_lo[ax] = meta_num(a, "x_lo" + s);
    h.spec.x_hi[ax] = meta_num(a, "x_hi" + s);
    h.spec.v_lo[ax] = meta_num(a, "v_lo" + s);
    h.spec.v_hi[ax] = meta_num(a, "v_hi" + s);
  }
  h.spec.validate();
  if (a.axes.size() != std::size_t(h.order))
    throw RuntimeError("histogram file: axis count does not match order");
  for (const auto& ax : a.axes)
    if (ax.extent != h.spec.n_cells())
      throw RuntimeError("histogram file: axis extent does not match spec");
  h.values = a.data;
  return h;
}

void write_histogram_csv(const PhaseHistogram& h, const std::string& path) {
  h.spec.validate();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw RuntimeError("cannot open for writing: " + tmp);
    os << "# order=" << h.order << " overflow=" << fmt(h.overflow_weight)
       << "\n";
    const int d = h.spec.d;
    for (int k = 0; k < h.order; ++k) {
      for (int ax = 0; ax < d; ++ax) os << "x" << ax << "_" << k << ",";
      for (int ax = 0; ax < d; ++ax) os << "v" << ax << "_" << k << ",";
    }
    os << "value\n";
    const std::size_t nc = h.spec.n_cells();
    for (std::size_t e = 0; e < h.values.size(); ++e) {
      std::size_t rem = e;
      std::size_t idx[3] = {0, 0, 0};
      for (int k = h.order - 1; k >= 0; --k) {
        idx[k] = rem % nc;
        rem /= nc;
      }
      for (int k = 0; k < h.order; ++k) {
        const PhasePoint z = h.spec.cell_center(idx[k]);
        for (int ax = 0; ax < d; ++ax) os << fmt(z.x[ax]) << ",";
        for (int ax = 0; ax < d; ++ax) os << fmt(z.v[ax]) << ",";
      }
      os << fmt(h.values[e]) << "\n";
    }
    if (!os) throw RuntimeError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw RuntimeError("cannot move into place: " + path);
}

}  // namespace kin

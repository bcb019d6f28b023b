// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string>

#include "kinetic/array_io.hpp"
#include "kinetic/boltzmann.hpp"

namespace kin {

namespace {

const char* axis_letter(int a) {
  static const char* names[3] = {"0", "1", "2"};
  return names[a];
}

double meta_num(const DenseArray& a, const std::string& key) {
  auto it = a.meta.find(key);
  if (it == a.meta.end())
    throw RuntimeError("field file: missing metadata key '" + key + "'");
  return std::strtod(it->second.c_str(), nullptr);
}

}  // namespace

void write_field(const DistributionField& f, const std::string& path) {
  f.vgrid.validate();
  DenseArray a;
  if (f.xgrid) {
    for (int ax = 0; ax < f.xgrid->d; ++ax)
      a.axes.push_back({std::string("x") + axis_letter(ax),
                        std::uint64_t(f.xgrid->n), f.xgrid->lo[ax],
                        f.xgrid->hi[ax]});
  }
  for (int ax = 0; ax < f.vgrid.d; ++ax)
    a.axes.push_back({std::string("v") + axis_letter(ax),
                      std::uint64_t(f.vgrid.n), -f.vgrid.v_max,
                      f.vgrid.v_max});
  a.meta["kind"] = "distribution-field";
  a.meta["d"] = std::to_string(f.vgrid.d);
  a.meta["layout"] = f.xgrid ? "inhomogeneous" : "homogeneous";
  a.data = f.values;
  write_dense_array(a, path);
}

DistributionField read_field(const std::string& path) {
  const DenseArray a = read_dense_array(path);
  auto kind = a.meta.find("kind");
  if (kind == a.meta.end() || kind->second != "distribution-field")
    throw RuntimeError("not a distribution field file: " + path);
  const int d = int(meta_num(a, "d"));
  if (d != 2 && d != 3) throw RuntimeError("field file: bad dimension");
  auto layout = a.meta.find("layout");
  const bool inhomogeneous =
      layout != a.meta.end() && layout->second == "inhomogeneous";
  const std::size_t expected = std::size_t(inhomogeneous ? 2 * d : d);
  if (a.axes.size() != expected)
    throw RuntimeError("field file: axis count does not match layout");

  const std::size_t voff = inhomogeneous ? std::size_t(d) : 0;
  VelocityGrid g;
  g.d = d;
  g.n = int(a.axes[voff].extent);
  g.v_max = a.axes[voff].hi;
  for (int ax = 0; ax < d; ++ax) {
    const ArrayAxis& va = a.axes[voff + std::size_t(ax)];
    if (int(va.extent) != g.n || va.hi != g.v_max || va.lo != -g.v_max)
      throw RuntimeError("field file: anisotropic velocity axes");
  }
  g.validate();

  DistributionField f;
  if (inhomogeneous) {
    SpatialGrid s;
    s.d = d;
    s.n = int(a.axes[0].extent);
    for (int ax = 0; ax < d; ++ax) {
      const ArrayAxis& xa = a.axes[std::size_t(ax)];
      if (int(xa.extent) != s.n)
        throw RuntimeError("field file: anisotropic spatial axes");
      s.lo[ax] = xa.lo;
      s.hi[ax] = xa.hi;
    }
    f = DistributionField::inhomogeneous(g, s);
  } else {
    f = DistributionField::homogeneous(g);
  }
  f.values = a.data;
  return f;
}

}  // namespace kin

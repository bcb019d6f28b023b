// SPDX-License-Identifier: Apache-2.0
//
// Small dense vector for d = 2 or 3, with d fixed at run configuration.
// Storage is always three doubles; for d = 2 the last component is kept
// at zero by construction so that dot/norm work unconditionally.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace kin {

struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    c[0] += o.c[0];
    c[1] += o.c[1];
    c[2] += o.c[2];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    c[0] -= o.c[0];
    c[1] -= o.c[1];
    c[2] -= o.c[2];
    return *this;
  }
  Vec& operator*=(double s) {
    c[0] *= s;
    c[1] *= s;
    c[2] *= s;
    return *this;
  }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }

inline double dot(const Vec& a, const Vec& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline bool finite(const Vec& a) {
  return std::isfinite(a.c[0]) && std::isfinite(a.c[1]) && std::isfinite(a.c[2]);
}

inline Vec make_vec(int d, double x, double y, double z = 0.0) {
  Vec v;
  v.c[0] = x;
  v.c[1] = y;
  v.c[2] = (d == 3) ? z : 0.0;
  return v;
}

}  // namespace kin

// SPDX-License-Identifier: Apache-2.0

#include "kinetic/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numeric>
#include <sstream>

#include "kinetic/parallel.hpp"

namespace kin {

namespace {

constexpr std::size_t kNodeBudget = 20000;  // max n^d for q_collision
constexpr double kEntropyFloor = 1e-30;

}  // namespace

void VelocityGrid::validate() const {
  if (d != 2 && d != 3) throw ContractError("velocity grid: d must be 2 or 3");
  if (n < 8) throw ContractError("velocity grid: n >= 8 required");
  if (!(v_max > 0.0)) throw ContractError("velocity grid: v_max must be positive");
}

std::size_t VelocityGrid::n_nodes() const {
  std::size_t m = 1;
  for (int a = 0; a < d; ++a) m *= std::size_t(n);
  return m;
}

Vec VelocityGrid::node(std::size_t flat) const {
  Vec v;
  for (int a = d - 1; a >= 0; --a) {
    v[a] = node_coord(int(flat % std::size_t(n)));
    flat /= std::size_t(n);
  }
  return v;
}

std::size_t SpatialGrid::n_cells() const {
  std::size_t m = 1;
  for (int a = 0; a < d; ++a) m *= std::size_t(n);
  return m;
}

Vec SpatialGrid::center(std::size_t flat) const {
  Vec x;
  for (int a = d - 1; a >= 0; --a) {
    x[a] = lo[a] + (double(flat % std::size_t(n)) + 0.5) * dx(a);
    flat /= std::size_t(n);
  }
  return x;
}

DistributionField DistributionField::homogeneous(const VelocityGrid& g) {
  g.validate();
  DistributionField f;
  f.vgrid = g;
  f.values.assign(g.n_nodes(), 0.0);
  return f;
}

DistributionField DistributionField::inhomogeneous(const VelocityGrid& g,
                                                   const SpatialGrid& s) {
  g.validate();
  if (s.d != g.d) throw ContractError("field: grid dimensions disagree");
  DistributionField f;
  f.vgrid = g;
  f.xgrid = s;
  f.values.assign(g.n_nodes() * s.n_cells(), 0.0);
  return f;
}

double DistributionField::cell_volume() const {
  double vol = std::pow(vgrid.dv(), vgrid.d);
  if (xgrid)
    for (int a = 0; a < xgrid->d; ++a) vol *= xgrid->dx(a);
  return vol;
}

bool DistributionField::same_shape(const DistributionField& o) const {
  if (!(vgrid == o.vgrid)) return false;
  if (xgrid.has_value() != o.xgrid.has_value()) return false;
  if (xgrid && !(*xgrid == *o.xgrid)) return false;
  return true;
}

AngularQuadrature AngularQuadrature::uniform_circle(int n) {
  if (n < 2 || n % 2 != 0)
    throw ContractError("angular quadrature: need even n >= 2");
  AngularQuadrature q;
  q.d = 2;
  for (int l = 0; l < n; ++l) {
    const double th = 2.0 * M_PI * (l + 0.5) / n;
    q.nodes.push_back(make_vec(2, std::cos(th), std::sin(th)));
    q.weights.push_back(2.0 * M_PI / n);
  }
  return q;
}

AngularQuadrature AngularQuadrature::icosahedral() {
  AngularQuadrature q;
  q.d = 3;
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const double r = std::sqrt(1.0 + phi * phi);
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0}) {
      q.nodes.push_back(make_vec(3, 0.0, s1 / r, s2 * phi / r));
      q.nodes.push_back(make_vec(3, s1 / r, s2 * phi / r, 0.0));
      q.nodes.push_back(make_vec(3, s1 * phi / r, 0.0, s2 / r));
    }
  q.weights.assign(12, 4.0 * M_PI / 12.0);
  return q;
}

namespace {

// Per (velocity-offset, angular-node) scattering stencil: kernel value and
// the two interpolation stencils for f(v') and f(v*'), expressed in grid
// units relative to the v and v* nodes.
struct ScatterEntry {
  double wkern = 0.0;  // w_l * ((v - v*).omega)_+, zero marks "skip"
  int b1[3] = {0, 0, 0}, b2[3] = {0, 0, 0};
  double f1[3] = {0, 0, 0}, f2[3] = {0, 0, 0};
};

struct ScatterTable {
  int d = 0, n = 0, n_omega = 0;
  double v_max = 0.0;
  std::vector<ScatterEntry> entries;  // [(2n-1)^d][n_omega]
};

ScatterTable build_scatter_table(const VelocityGrid& g,
                                 const AngularQuadrature& quad) {
  const int d = g.d, n = g.n;
  const int span = 2 * n - 1;
  const double dv = g.dv();
  ScatterTable tab;
  tab.d = d;
  tab.n = n;
  tab.n_omega = int(quad.nodes.size());
  tab.v_max = g.v_max;
  std::size_t n_off = 1;
  for (int a = 0; a < d; ++a) n_off *= std::size_t(span);
  tab.entries.assign(n_off * quad.nodes.size(), ScatterEntry{});

  for (std::size_t off = 0; off < n_off; ++off) {
    int delta[3] = {0, 0, 0};
    std::size_t rem = off;
    for (int a = d - 1; a >= 0; --a) {
      delta[a] = int(rem % std::size_t(span)) - (n - 1);
      rem /= std::size_t(span);
    }
    Vec dvel;  // v - v*
    for (int a = 0; a < d; ++a) dvel[a] = delta[a] * dv;
    for (std::size_t l = 0; l < quad.nodes.size(); ++l) {
      const Vec& om = quad.nodes[l];
      const double proj = dot(dvel, om);
      if (proj <= 0.0) continue;  // kernel (.)_+ vanishes
      ScatterEntry e;
      e.wkern = quad.weights[l] * proj;
      // v' = v - proj*om ; v*' = v* + proj*om
      for (int a = 0; a < d; ++a) {
        const double u1 = -proj * om[a] / dv;
        const double u2 = proj * om[a] / dv;
        e.b1[a] = int(std::floor(u1));
        e.f1[a] = u1 - e.b1[a];
        e.b2[a] = int(std::floor(u2));
        e.f2[a] = u2 - e.b2[a];
      }
      tab.entries[off * quad.nodes.size() + l] = e;
    }
  }
  return tab;
}

// one cached table; rebuilt when the (grid, quadrature) signature changes
std::mutex g_table_mutex;
ScatterTable g_table;

const ScatterTable& scatter_table_for(const VelocityGrid& g,
                                      const AngularQuadrature& quad) {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  if (g_table.d != g.d || g_table.n != g.n || g_table.v_max != g.v_max ||
      g_table.n_omega != int(quad.nodes.size())) {
    g_table = build_scatter_table(g, quad);
  }
  return g_table;
}

inline double gather2(const double* f, int n, int ix, int iy, double fx,
                      double fy) {
  auto at = [&](int a, int b) -> double {
    if (a < 0 || a >= n || b < 0 || b >= n) return 0.0;
    return f[std::size_t(a) * n + b];
  };
  return (1.0 - fx) * ((1.0 - fy) * at(ix, iy) + fy * at(ix, iy + 1)) +
         fx * ((1.0 - fy) * at(ix + 1, iy) + fy * at(ix + 1, iy + 1));
}

inline double gather3(const double* f, int n, int ix, int iy, int iz,
                      double fx, double fy, double fz) {
  auto at = [&](int a, int b, int c) -> double {
    if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n) return 0.0;
    return f[(std::size_t(a) * n + b) * n + c];
  };
  double acc = 0.0;
  for (int ca = 0; ca <= 1; ++ca)
    for (int cb = 0; cb <= 1; ++cb)
      for (int cc = 0; cc <= 1; ++cc)
        acc += (ca ? fx : 1.0 - fx) * (cb ? fy : 1.0 - fy) *
               (cc ? fz : 1.0 - fz) * at(ix + ca, iy + cb, iz + cc);
  return acc;
}

void q_collision_into(const double* f, const VelocityGrid& g,
                      const ScatterTable& tab, double* out) {
  const int n = g.n;
  const int span = 2 * n - 1;
  const int nw = tab.n_omega;
  const double mv = std::pow(g.dv(), g.d);  // dv^d measure for the v* sum

  if (g.d == 2) {
    parallel_for(std::size_t(n), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t ix = lo; ix < hi; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
          const double fi = f[ix * n + iy];
          double acc = 0.0;
          for (int jx = 0; jx < n; ++jx) {
            const std::size_t drow = std::size_t(int(ix) - jx + n - 1) * span;
            for (int jy = 0; jy < n; ++jy) {
              const double fj = f[std::size_t(jx) * n + jy];
              const double loss = fi * fj;
              const std::size_t dflat = drow + std::size_t(iy - jy + n - 1);
              const ScatterEntry* es = &tab.entries[dflat * nw];
              for (int l = 0; l < nw; ++l) {
                const ScatterEntry& e = es[l];
                if (e.wkern == 0.0) continue;
                const double fp = gather2(f, n, int(ix) + e.b1[0],
                                          iy + e.b1[1], e.f1[0], e.f1[1]);
                if (fp == 0.0 && loss == 0.0) continue;
                const double fsp = gather2(f, n, jx + e.b2[0], jy + e.b2[1],
                                           e.f2[0], e.f2[1]);
                acc += e.wkern * (fp * fsp - loss);
              }
            }
          }
          out[ix * n + iy] = acc * mv;
        }
      }
    });
  } else {
    const std::size_t n_nodes = g.n_nodes();
    parallel_for(n_nodes, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t iv = lo; iv < hi; ++iv) {
        const int ix = int(iv / (std::size_t(n) * n));
        const int iy = int((iv / n) % std::size_t(n));
        const int iz = int(iv % std::size_t(n));
        const double fi = f[iv];
        double acc = 0.0;
        for (std::size_t jv = 0; jv < n_nodes; ++jv) {
          const int jx = int(jv / (std::size_t(n) * n));
          const int jy = int((jv / n) % std::size_t(n));
          const int jz = int(jv % std::size_t(n));
          const double loss = fi * f[jv];
          const std::size_t dflat =
              (std::size_t(ix - jx + n - 1) * span + std::size_t(iy - jy + n - 1)) *
                  span +
              std::size_t(iz - jz + n - 1);
          const ScatterEntry* es = &tab.entries[dflat * nw];
          for (int l = 0; l < nw; ++l) {
            const ScatterEntry& e = es[l];
            if (e.wkern == 0.0) continue;
            const double fp =
                gather3(f, n, ix + e.b1[0], iy + e.b1[1], iz + e.b1[2],
                        e.f1[0], e.f1[1], e.f1[2]);
            if (fp == 0.0 && loss == 0.0) continue;
            const double fsp =
                gather3(f, n, jx + e.b2[0], jy + e.b2[1], jz + e.b2[2],
                        e.f2[0], e.f2[1], e.f2[2]);
            acc += e.wkern * (fp * fsp - loss);
          }
        }
        out[iv] = acc * mv;
      }
    });
  }
}

}  // namespace

DistributionField q_collision(const DistributionField& f,
                              const AngularQuadrature& quad) {
  if (f.xgrid) throw ContractError("q_collision: homogeneous fields only");
  if (quad.d != f.vgrid.d) throw ContractError("q_collision: dimension mismatch");
  if (f.vgrid.n_nodes() > kNodeBudget)
    throw ContractError("q_collision: velocity node budget exceeded");
  const ScatterTable& tab = scatter_table_for(f.vgrid, quad);
  DistributionField q = DistributionField::homogeneous(f.vgrid);
  q_collision_into(f.values.data(), f.vgrid, tab, q.values.data());
  return q;
}

namespace {

// basis {1, v_1..v_d, |v|^2} evaluated on the grid
std::vector<std::vector<double>> invariant_basis(const VelocityGrid& g) {
  const int nb = g.d + 2;
  std::vector<std::vector<double>> phi(std::size_t(nb),
                                       std::vector<double>(g.n_nodes()));
  for (std::size_t iv = 0; iv < g.n_nodes(); ++iv) {
    const Vec v = g.node(iv);
    phi[0][iv] = 1.0;
    for (int a = 0; a < g.d; ++a) phi[std::size_t(1 + a)][iv] = v[a];
    phi[std::size_t(g.d + 1)][iv] = norm2(v);
  }
  return phi;
}

std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t piv = p;
    for (std::size_t r = p + 1; r < n; ++r)
      if (std::abs(a[r][p]) > std::abs(a[piv][p])) piv = r;
    if (std::abs(a[piv][p]) < 1e-300)
      throw RuntimeError("conservative_fix: singular Gram matrix");
    std::swap(a[p], a[piv]);
    std::swap(b[p], b[piv]);
    for (std::size_t r = p + 1; r < n; ++r) {
      const double m = a[r][p] / a[p][p];
      for (std::size_t c = p; c < n; ++c) a[r][c] -= m * a[p][c];
      b[r] -= m * b[p];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t p = n; p-- > 0;) {
    double s = b[p];
    for (std::size_t c = p + 1; c < n; ++c) s -= a[p][c] * x[c];
    x[p] = s / a[p][p];
  }
  return x;
}

void conservative_fix_slice(const VelocityGrid& g, const double* q,
                            const double* f, double* out) {
  const auto phi = invariant_basis(g);
  const std::size_t nb = phi.size();
  const std::size_t nn = g.n_nodes();
  std::vector<std::vector<double>> gram(nb, std::vector<double>(nb, 0.0));
  std::vector<double> rhs(nb, 0.0);
  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t b = a; b < nb; ++b) {
      double s = 0.0;
      for (std::size_t iv = 0; iv < nn; ++iv) s += f[iv] * phi[a][iv] * phi[b][iv];
      gram[a][b] = gram[b][a] = s;
    }
    double r = 0.0;
    for (std::size_t iv = 0; iv < nn; ++iv) r += q[iv] * phi[a][iv];
    rhs[a] = r;
  }
  const auto coef = solve_dense(gram, rhs);
  for (std::size_t iv = 0; iv < nn; ++iv) {
    double corr = 0.0;
    for (std::size_t a = 0; a < nb; ++a) corr += coef[a] * phi[a][iv];
    out[iv] = q[iv] - f[iv] * corr;
  }
}

}  // namespace

DistributionField conservative_fix(const DistributionField& q,
                                   const DistributionField& f) {
  if (q.xgrid || f.xgrid)
    throw ContractError("conservative_fix: homogeneous fields only");
  if (!q.same_shape(f)) throw ContractError("conservative_fix: shape mismatch");
  DistributionField out = DistributionField::homogeneous(q.vgrid);
  conservative_fix_slice(q.vgrid, q.values.data(), f.values.data(),
                         out.values.data());
  return out;
}

double stability_load(const DistributionField& f, double dt) {
  const int d = f.vgrid.d;
  const double cd = (d == 2) ? 2.0 : M_PI;  // int over S^{d-1} of (u.w)_+ / |u|
  const std::size_t nn = f.vgrid.n_nodes();
  const double dvd = std::pow(f.vgrid.dv(), d);
  std::vector<Vec> nodes(nn);
  for (std::size_t iv = 0; iv < nn; ++iv) nodes[iv] = f.vgrid.node(iv);
  // loss rate nu(v) = c_d * sum_j f_j |v - v_j| dv^d is convex in v, so its
  // maximum over the grid sits at a corner of the velocity box
  const std::size_t n_corners = std::size_t(1) << d;
  std::vector<Vec> corners(n_corners);
  for (std::size_t c = 0; c < n_corners; ++c)
    for (int a = 0; a < d; ++a)
      corners[c][a] = (c >> a) & 1 ? f.vgrid.v_max : -f.vgrid.v_max;
  double rate_max = 0.0;
  for (std::size_t xc = 0; xc < f.n_xcells(); ++xc) {
    const double* slice = f.values.data() + xc * nn;
    for (std::size_t c = 0; c < n_corners; ++c) {
      double r = 0.0;
      for (std::size_t j = 0; j < nn; ++j)
        r += slice[j] * norm(corners[c] - nodes[j]);
      rate_max = std::max(rate_max, r * dvd);
    }
  }
  return dt * rate_max * cd;
}

namespace {

// clip negatives to zero, restore the pre-clip mass by scaling the
// positive part; returns the clipped (negative) mass magnitude
double clip_restitute(std::vector<double>& v) {
  double neg = 0.0, pos = 0.0;
  for (double x : v) (x < 0.0 ? neg : pos) += x;
  if (neg == 0.0) return 0.0;
  const double target = pos + neg;  // pre-clip mass
  const double scale = pos > 0.0 ? std::max(0.0, target) / pos : 0.0;
  for (double& x : v) x = x < 0.0 ? 0.0 : x * scale;
  return -neg;
}

void step_homogeneous_slice(const VelocityGrid& g, const ScatterTable& tab,
                            double dt, std::vector<double>& f,
                            StepReport* report) {
  const std::size_t nn = g.n_nodes();
  std::vector<double> q(nn), k(nn), mid(nn);
  q_collision_into(f.data(), g, tab, q.data());
  conservative_fix_slice(g, q.data(), f.data(), k.data());
  for (std::size_t iv = 0; iv < nn; ++iv) mid[iv] = f[iv] + 0.5 * dt * k[iv];
  double clipped = clip_restitute(mid);
  q_collision_into(mid.data(), g, tab, q.data());
  conservative_fix_slice(g, q.data(), mid.data(), k.data());
  for (std::size_t iv = 0; iv < nn; ++iv) f[iv] += dt * k[iv];
  clipped += clip_restitute(f);
  if (report) report->clipped_mass += clipped * std::pow(g.dv(), g.d);
}

}  // namespace

DistributionField step_homogeneous(const DistributionField& f, double dt,
                                   const AngularQuadrature& quad,
                                   StepReport* report) {
  if (f.xgrid) throw ContractError("step_homogeneous: homogeneous fields only");
  const double load = stability_load(f, dt);
  if (load > 0.5) {
    std::ostringstream msg;
    msg << "step_homogeneous: stability budget exceeded (dt x rate = " << load
        << " > 0.5); reduce dt";
    throw ContractError(msg.str());
  }
  const ScatterTable& tab = scatter_table_for(f.vgrid, quad);
  DistributionField out = f;
  step_homogeneous_slice(f.vgrid, tab, dt, out.values, report);
  return out;
}

DistributionField free_transport(const DistributionField& f, double t,
                                 StepReport* report) {
  if (!f.xgrid) throw ContractError("free_transport: spatial grid required");
  const SpatialGrid& s = *f.xgrid;
  const VelocityGrid& g = f.vgrid;
  const int d = g.d, nx = s.n;
  const std::size_t nn = g.n_nodes();
  DistributionField out = DistributionField::inhomogeneous(g, s);

  const double mass_before =
      std::accumulate(f.values.begin(), f.values.end(), 0.0);

  // Catmull-Rom weights at fraction fr in [0,1) for stencil offsets -1..2.
  auto cubic_w = [](double fr, double w[4]) {
    const double f2 = fr * fr, f3 = f2 * fr;
    w[0] = -0.5 * fr + f2 - 0.5 * f3;
    w[1] = 1.0 - 2.5 * f2 + 1.5 * f3;
    w[2] = 0.5 * fr + 2.0 * f2 - 1.5 * f3;
    w[3] = -0.5 * f2 + 0.5 * f3;
  };

  parallel_for(nn, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t iv = lo; iv < hi; ++iv) {
      const Vec v = g.node(iv);
      double shift[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) shift[a] = v[a] * t / s.dx(a);
      // pull: out(ix) = in(ix - shift), tensor-product cubic clamped to the
      // local linear-stencil range (no overshoot, stays nonnegative), zero
      // outside the domain
      if (d == 2) {
        for (int ix = 0; ix < nx; ++ix) {
          const double sx = ix - shift[0];
          const int bx = int(std::floor(sx));
          const double fx = sx - bx;
          double wx[4];
          cubic_w(fx, wx);
          for (int iy = 0; iy < nx; ++iy) {
            const double sy = iy - shift[1];
            const int by = int(std::floor(sy));
            const double fy = sy - by;
            double wy[4];
            cubic_w(fy, wy);
            auto at = [&](int a, int b) -> double {
              if (a < 0 || a >= nx || b < 0 || b >= nx) return 0.0;
              return f.values[(std::size_t(a) * nx + b) * nn + iv];
            };
            double acc = 0.0;
            for (int c1 = 0; c1 < 4; ++c1)
              for (int c2 = 0; c2 < 4; ++c2)
                acc += wx[c1] * wy[c2] * at(bx - 1 + c1, by - 1 + c2);
            double lin_lo = at(bx, by), lin_hi = lin_lo;
            for (int c1 = 0; c1 <= 1; ++c1)
              for (int c2 = 0; c2 <= 1; ++c2) {
                const double q = at(bx + c1, by + c2);
                lin_lo = std::min(lin_lo, q);
                lin_hi = std::max(lin_hi, q);
              }
            out.values[(std::size_t(ix) * nx + iy) * nn + iv] =
                std::clamp(acc, lin_lo, lin_hi);
          }
        }
      } else {
        for (std::size_t xc = 0; xc < s.n_cells(); ++xc) {
          const int ix = int(xc / (std::size_t(nx) * nx));
          const int iy = int((xc / nx) % std::size_t(nx));
          const int iz = int(xc % std::size_t(nx));
          const double cs[3] = {ix - shift[0], iy - shift[1], iz - shift[2]};
          int b[3];
          double w[3][4];
          for (int a = 0; a < 3; ++a) {
            b[a] = int(std::floor(cs[a]));
            cubic_w(cs[a] - b[a], w[a]);
          }
          auto at = [&](int a1, int a2, int a3) -> double {
            if (a1 < 0 || a1 >= nx || a2 < 0 || a2 >= nx || a3 < 0 || a3 >= nx)
              return 0.0;
            return f.values[((std::size_t(a1) * nx + a2) * nx + a3) * nn + iv];
          };
          double acc = 0.0;
          for (int c1 = 0; c1 < 4; ++c1)
            for (int c2 = 0; c2 < 4; ++c2)
              for (int c3 = 0; c3 < 4; ++c3)
                acc += w[0][c1] * w[1][c2] * w[2][c3] *
                       at(b[0] - 1 + c1, b[1] - 1 + c2, b[2] - 1 + c3);
          double lin_lo = at(b[0], b[1], b[2]), lin_hi = lin_lo;
          for (int c1 = 0; c1 <= 1; ++c1)
            for (int c2 = 0; c2 <= 1; ++c2)
              for (int c3 = 0; c3 <= 1; ++c3) {
                const double q = at(b[0] + c1, b[1] + c2, b[2] + c3);
                lin_lo = std::min(lin_lo, q);
                lin_hi = std::max(lin_hi, q);
              }
          out.values[xc * nn + iv] = std::clamp(acc, lin_lo, lin_hi);
        }
      }
    }
  });

  if (report) {
    const double mass_after =
        std::accumulate(out.values.begin(), out.values.end(), 0.0);
    report->outflow_mass += (mass_before - mass_after) * f.cell_volume();
  }
  return out;
}

DistributionField step_inhomogeneous(const DistributionField& f, double dt,
                                     const AngularQuadrature& quad,
                                     StepReport* report) {
  if (!f.xgrid) throw ContractError("step_inhomogeneous: spatial grid required");
  const double load = stability_load(f, dt);
  if (load > 0.5) {
    std::ostringstream msg;
    msg << "step_inhomogeneous: stability budget exceeded (dt x rate = "
        << load << " > 0.5); reduce dt";
    throw ContractError(msg.str());
  }
  const ScatterTable& tab = scatter_table_for(f.vgrid, quad);
  DistributionField out = free_transport(f, 0.5 * dt, report);
  const std::size_t nn = f.vgrid.n_nodes();
  std::vector<double> slice(nn);
  for (std::size_t xc = 0; xc < out.n_xcells(); ++xc) {
    std::memcpy(slice.data(), out.values.data() + xc * nn, nn * sizeof(double));
    bool empty = true;
    for (double v : slice)
      if (v != 0.0) {
        empty = false;
        break;
      }
    if (empty) continue;  // vacuum cell: Q = 0
    step_homogeneous_slice(f.vgrid, tab, dt, slice, report);
    std::memcpy(out.values.data() + xc * nn, slice.data(), nn * sizeof(double));
  }
  return free_transport(out, 0.5 * dt, report);
}

PicardResult picard_duhamel(const DistributionField& f0, double t,
                            int iterations, int n_time_cells,
                            const AngularQuadrature& quad) {
  if (!f0.xgrid) throw ContractError("picard_duhamel: spatial grid required");
  if (n_time_cells < 1) throw ContractError("picard_duhamel: n_time_cells >= 1");
  if (iterations < 0) throw ContractError("picard_duhamel: iterations >= 0");
  const ScatterTable& tab = scatter_table_for(f0.vgrid, quad);
  const int m = n_time_cells;
  const double ds = t / m;
  const std::size_t nn = f0.vgrid.n_nodes();

  // free-flow baseline at the sub-times
  std::vector<DistributionField> base;
  base.reserve(std::size_t(m) + 1);
  for (int j = 0; j <= m; ++j) base.push_back(free_transport(f0, j * ds));

  std::vector<DistributionField> cur = base;
  PicardResult res;
  for (int it = 0; it < iterations; ++it) {
    // Q(f^(k)(s_j)) with the conservative correction, per spatial cell
    std::vector<DistributionField> qs;
    qs.reserve(cur.size());
    for (const auto& fj : cur) {
      DistributionField q = DistributionField::inhomogeneous(f0.vgrid, *f0.xgrid);
      std::vector<double> qv(nn), qfix(nn);
      for (std::size_t xc = 0; xc < fj.n_xcells(); ++xc) {
        const double* slice = fj.values.data() + xc * nn;
        bool empty = true;
        for (std::size_t iv = 0; iv < nn; ++iv)
          if (slice[iv] != 0.0) {
            empty = false;
            break;
          }
        if (empty) continue;
        q_collision_into(slice, f0.vgrid, tab, qv.data());
        conservative_fix_slice(f0.vgrid, qv.data(), slice, qfix.data());
        std::memcpy(q.values.data() + xc * nn, qfix.data(), nn * sizeof(double));
      }
      qs.push_back(std::move(q));
    }
    std::vector<DistributionField> next;
    next.reserve(cur.size());
    double sup_update = 0.0;
    for (int jm = 0; jm <= m; ++jm) {
      DistributionField acc = base[std::size_t(jm)];
      for (int j = 0; j <= jm; ++j) {
        const double w = (j == 0 || j == jm) ? 0.5 * ds : ds;
        if (w == 0.0 || jm == 0) continue;
        DistributionField moved =
            free_transport(qs[std::size_t(j)], (jm - j) * ds);
        for (std::size_t c = 0; c < acc.values.size(); ++c)
          acc.values[c] += w * moved.values[c];
      }
      for (std::size_t c = 0; c < acc.values.size(); ++c)
        sup_update = std::max(
            sup_update, std::abs(acc.values[c] - cur[std::size_t(jm)].values[c]));
      next.push_back(std::move(acc));
    }
    cur = std::move(next);
    res.update_history.push_back(sup_update);
    const std::size_t h = res.update_history.size();
    if (h >= 3 && res.update_history[h - 1] > res.update_history[h - 2] &&
        res.update_history[h - 2] > res.update_history[h - 3]) {
      std::ostringstream msg;
      msg << "picard_duhamel: iteration diverging; contraction horizon is "
             "below t = "
          << t;
      throw RuntimeError(msg.str());
    }
  }
  res.f = cur.back();
  res.last_update = res.update_history.empty() ? 0.0 : res.update_history.back();
  return res;
}

EntropyReport entropy_and_dissipation(const DistributionField& f,
                                      const AngularQuadrature& quad) {
  if (f.xgrid)
    throw ContractError("entropy_and_dissipation: homogeneous fields only");
  const double dvd = std::pow(f.vgrid.dv(), f.vgrid.d);
  EntropyReport rep;
  DistributionField q = conservative_fix(q_collision(f, quad), f);
  for (std::size_t iv = 0; iv < f.values.size(); ++iv) {
    const double fi = f.values[iv];
    if (fi < 0.0) throw ContractError("entropy_and_dissipation: f must be >= 0");
    if (fi > kEntropyFloor) {
      const double lg = std::log(fi);
      rep.h += fi * lg * dvd;
      rep.d -= q.values[iv] * lg * dvd;
    }
  }
  return rep;
}

Moments moments(const DistributionField& f) {
  Moments mo;
  const std::size_t nn = f.vgrid.n_nodes();
  const double vol = f.cell_volume();
  for (std::size_t xc = 0; xc < f.n_xcells(); ++xc)
    for (std::size_t iv = 0; iv < nn; ++iv) {
      const double fv = f.values[xc * nn + iv];
      if (fv == 0.0) continue;
      const Vec v = f.vgrid.node(iv);
      mo.mass += fv;
      mo.momentum += fv * v;
      mo.energy += 0.5 * fv * norm2(v);
    }
  mo.mass *= vol;
  mo.momentum *= vol;
  mo.energy *= vol;
  return mo;
}

DistributionField matched_maxwellian(const DistributionField& f) {
  if (f.xgrid) throw ContractError("matched_maxwellian: homogeneous fields only");
  const Moments mo = moments(f);
  if (!(mo.mass > 0.0)) throw ContractError("matched_maxwellian: zero mass");
  const int d = f.vgrid.d;
  const Vec u = (1.0 / mo.mass) * mo.momentum;
  const double e_int = mo.energy / mo.mass - 0.5 * norm2(u);
  if (!(e_int > 0.0)) throw ContractError("matched_maxwellian: zero temperature");
  const double beta = 0.5 * d / e_int;
  DistributionField out = DistributionField::homogeneous(f.vgrid);
  for (std::size_t iv = 0; iv < out.values.size(); ++iv)
    out.values[iv] = mo.mass * maxwellian(d, beta, f.vgrid.node(iv) - u);
  return out;
}

DistributionField tabulate_homogeneous(
    const VelocityGrid& g, const std::function<double(const Vec&)>& f) {
  DistributionField out = DistributionField::homogeneous(g);
  for (std::size_t iv = 0; iv < out.values.size(); ++iv)
    out.values[iv] = f(g.node(iv));
  return out;
}

DistributionField tabulate_inhomogeneous(
    const VelocityGrid& g, const SpatialGrid& s,
    const std::function<double(const Vec&, const Vec&)>& f) {
  DistributionField out = DistributionField::inhomogeneous(g, s);
  const std::size_t nn = g.n_nodes();
  for (std::size_t xc = 0; xc < s.n_cells(); ++xc) {
    const Vec x = s.center(xc);
    for (std::size_t iv = 0; iv < nn; ++iv)
      out.values[xc * nn + iv] = f(x, g.node(iv));
  }
  return out;
}

}  // namespace kin

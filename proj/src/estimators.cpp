// SPDX-License-Identifier: Apache-2.0

#include "kinetic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kin {

void BinningSpec::validate() const {
  if (d != 2 && d != 3) throw ContractError("binning: d must be 2 or 3");
  if (nx < 1 || nv < 1) throw ContractError("binning: cell counts must be >= 1");
  for (int a = 0; a < d; ++a) {
    if (!(x_hi[a] > x_lo[a]) || !(v_hi[a] > v_lo[a]))
      throw ContractError("binning: non-positive extents");
  }
  if (n_cells() > cell_budget) throw ContractError("binning: cell budget exceeded");
}

std::size_t BinningSpec::n_cells() const {
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) n *= std::size_t(nx);
  for (int a = 0; a < d; ++a) n *= std::size_t(nv);
  return n;
}

double BinningSpec::cell_volume() const {
  double vol = 1.0;
  for (int a = 0; a < d; ++a) vol *= (x_hi[a] - x_lo[a]) / nx;
  for (int a = 0; a < d; ++a) vol *= (v_hi[a] - v_lo[a]) / nv;
  return vol;
}

std::optional<std::size_t> BinningSpec::cell_index(const PhasePoint& z) const {
  std::size_t idx = 0;
  for (int a = 0; a < d; ++a) {
    const double u = (z.x[a] - x_lo[a]) / (x_hi[a] - x_lo[a]);
    if (u < 0.0 || u >= 1.0) return std::nullopt;
    idx = idx * std::size_t(nx) + std::size_t(u * nx);
  }
  for (int a = 0; a < d; ++a) {
    const double u = (z.v[a] - v_lo[a]) / (v_hi[a] - v_lo[a]);
    if (u < 0.0 || u >= 1.0) return std::nullopt;
    idx = idx * std::size_t(nv) + std::size_t(u * nv);
  }
  return idx;
}

PhasePoint BinningSpec::cell_center(std::size_t idx) const {
  std::vector<std::size_t> sub(std::size_t(2 * d));
  for (int a = 2 * d - 1; a >= 0; --a) {
    const std::size_t base = (a < d) ? std::size_t(nx) : std::size_t(nv);
    sub[std::size_t(a)] = idx % base;
    idx /= base;
  }
  PhasePoint z;
  for (int a = 0; a < d; ++a)
    z.x[a] = x_lo[a] + (sub[std::size_t(a)] + 0.5) * (x_hi[a] - x_lo[a]) / nx;
  for (int a = 0; a < d; ++a)
    z.v[a] = v_lo[a] + (sub[std::size_t(d + a)] + 0.5) * (v_hi[a] - v_lo[a]) / nv;
  return z;
}

bool BinningSpec::operator==(const BinningSpec& o) const {
  return d == o.d && nx == o.nx && nv == o.nv && x_lo == o.x_lo &&
         x_hi == o.x_hi && v_lo == o.v_lo && v_hi == o.v_hi;
}

double empirical_field(const Configuration& config,
                       const std::function<double(const PhasePoint&)>& h,
                       const ModelParams& params) {
  double sum = 0.0;
  for (const auto& p : config.particles) sum += h(p.z);
  return sum / params.mu;
}

EnsembleCounts count_ensemble(const std::vector<Configuration>& configs,
                              const BinningSpec& spec, int order) {
  spec.validate();
  if (order < 1 || order > 3) throw ContractError("count_ensemble: order in {1,2,3}");
  const std::size_t nc = spec.n_cells();
  double total_entries = 1.0;
  for (int k = 0; k < order; ++k) total_entries *= double(nc);
  if (total_entries > double(spec.cell_budget))
    throw ContractError("count_ensemble: cell-tuple budget exceeded");
  const std::size_t n_entries = std::size_t(total_entries);

  EnsembleCounts out;
  out.spec = spec;
  out.order = order;
  out.member_counts.reserve(configs.size());
  out.member_overflow.assign(configs.size(), 0);

  std::vector<std::optional<std::size_t>> cell;
  for (std::size_t m = 0; m < configs.size(); ++m) {
    const auto& cfg = configs[m];
    cell.clear();
    cell.reserve(cfg.size());
    std::uint64_t overflow = 0;
    for (const auto& p : cfg.particles) {
      cell.push_back(spec.cell_index(p.z));
      if (!cell.back()) ++overflow;
    }
    std::vector<std::uint32_t> counts(n_entries, 0);
    const std::size_t n = cfg.size();
    if (order == 1) {
      for (std::size_t i = 0; i < n; ++i)
        if (cell[i]) ++counts[*cell[i]];
    } else if (order == 2) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!cell[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !cell[j]) continue;
          ++counts[*cell[i] * nc + *cell[j]];
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!cell[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !cell[j]) continue;
          for (std::size_t k = 0; k < n; ++k) {
            if (k == i || k == j || !cell[k]) continue;
            ++counts[(*cell[i] * nc + *cell[j]) * nc + *cell[k]];
          }
        }
      }
    }
    out.member_overflow[m] = overflow;
    out.member_counts.push_back(std::move(counts));
  }
  return out;
}

PhaseHistogram EnsembleCounts::normalize(
    double mu, const std::vector<std::uint32_t>& multiplicity) const {
  if (!multiplicity.empty() && multiplicity.size() != member_counts.size())
    throw ContractError("normalize: multiplicity size mismatch");
  PhaseHistogram h;
  h.spec = spec;
  h.order = order;
  const std::size_t n_entries =
      member_counts.empty() ? 0 : member_counts.front().size();
  h.values.assign(n_entries, 0.0);
  std::uint64_t m_eff = 0;
  double overflow = 0.0;
  for (std::size_t m = 0; m < member_counts.size(); ++m) {
    const std::uint32_t w = multiplicity.empty() ? 1u : multiplicity[m];
    if (w == 0) continue;
    m_eff += w;
    overflow += double(w) * double(member_overflow[m]);
    const auto& counts = member_counts[m];
    for (std::size_t c = 0; c < n_entries; ++c)
      h.values[c] += double(w) * double(counts[c]);
  }
  if (m_eff == 0) throw ContractError("normalize: empty ensemble");
  double norm = double(m_eff);
  for (int k = 0; k < order; ++k) norm *= mu * spec.cell_volume();
  for (auto& v : h.values) v /= norm;
  h.overflow_weight = overflow / (double(m_eff) * std::pow(mu, order));
  return h;
}

PhaseHistogram bin_f1(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params) {
  return count_ensemble(configs, spec, 1).normalize(params.mu);
}

PhaseHistogram bin_f2(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params) {
  return count_ensemble(configs, spec, 2).normalize(params.mu);
}

PhaseHistogram bin_f3(const std::vector<Configuration>& configs,
                      const BinningSpec& spec, const ModelParams& params) {
  return count_ensemble(configs, spec, 3).normalize(params.mu);
}

Cumulants cumulants(const PhaseHistogram& f1, const PhaseHistogram& f2,
                    const PhaseHistogram* f3) {
  if (!(f1.spec == f2.spec) || f1.order != 1 || f2.order != 2)
    throw ContractError("cumulants: incompatible inputs");
  const std::size_t nc = f1.values.size();
  Cumulants out;
  out.e2.spec = f1.spec;
  out.e2.order = 2;
  out.e2.values.resize(nc * nc);
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = 0; b < nc; ++b)
      out.e2.values[a * nc + b] = f2.values[a * nc + b] - f1.values[a] * f1.values[b];
  if (f3) {
    if (!(f3->spec == f1.spec) || f3->order != 3)
      throw ContractError("cumulants: incompatible f3");
    PhaseHistogram e3;
    e3.spec = f1.spec;
    e3.order = 3;
    e3.values.resize(nc * nc * nc);
    for (std::size_t a = 0; a < nc; ++a)
      for (std::size_t b = 0; b < nc; ++b)
        for (std::size_t c = 0; c < nc; ++c) {
          const double fab = f2.values[a * nc + b];
          const double fac = f2.values[a * nc + c];
          const double fbc = f2.values[b * nc + c];
          const double pa = f1.values[a], pb = f1.values[b], pc = f1.values[c];
          e3.values[(a * nc + b) * nc + c] =
              f3->values[(a * nc + b) * nc + c] -
              (fab * pc + fac * pb + fbc * pa) + 2.0 * pa * pb * pc;
        }
    out.e3 = std::move(e3);
  }
  return out;
}

double l1_distance(const PhaseHistogram& a, const PhaseHistogram& b) {
  if (!(a.spec == b.spec) || a.order != b.order ||
      a.values.size() != b.values.size())
    throw ContractError("l1_distance: shape mismatch");
  const double vol = std::pow(a.spec.cell_volume(), a.order);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    sum += std::abs(a.values[i] - b.values[i]);
  return sum * vol;
}

double l1_norm(const PhaseHistogram& a) {
  const double vol = std::pow(a.spec.cell_volume(), a.order);
  double sum = 0.0;
  for (double v : a.values) sum += std::abs(v);
  return sum * vol;
}

PowerLawFit fit_power_law(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw ContractError("fit_power_law: need >= 3 points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw ContractError("fit_power_law: inputs must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double n = double(xs.size());
  const double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
  const double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ContractError("fit_power_law: degenerate abscissae");
  PowerLawFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.max_residual = std::max(
        fit.max_residual, std::abs(ly[i] - (fit.intercept + fit.slope * lx[i])));
  return fit;
}

}  // namespace kin

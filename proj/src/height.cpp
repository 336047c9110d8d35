#include "flatdimers/height.hpp"

#include <algorithm>
#include <cmath>

namespace flatdimers {

Flow dimer_flow(const DimerGraph& g, const DimerCover& d) {
  if (!d.valid(g)) throw Error("dimer_flow: invalid cover");
  Flow f;
  f.val.assign(g.edges.size(), 0.0);
  for (int e : d.edge_of_white) f.val[e] = 1.0;
  return f;
}

Flow angle_flow(const DimerGraph& g) {
  Flow f;
  f.val.resize(g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) f.val[e] = g.edges[e].f_angle;
  return f;
}

double divergence(const DimerGraph& g, const Flow& f, int vertex) {
  double s = 0.0;
  for (int e : g.vedges[vertex])
    s += (g.edges[e].w == vertex) ? f.val[e] : -f.val[e];
  return s;
}

std::vector<double> period_vector(const DimerGraph& g, const Flow& f,
                                  const TwistVector& alpha_g) {
  if (!g.has_crossings) throw Error("period_vector: crossing data missing");
  int gen = g.genus;
  std::vector<double> p(2 * gen, 0.0);
  for (size_t e = 0; e < g.edges.size(); ++e)
    for (int j = 0; j < 2 * gen; ++j)
      p[j] += double(g.edges[e].cross[j]) * f.val[e];
  for (int j = 0; j < gen; ++j) {
    p[j] -= 2 * alpha_g.a[j];
    p[gen + j] -= 2 * alpha_g.b[j];
  }
  return p;
}

std::vector<long long> height_periods(const DimerGraph& g, const DimerCover& d,
                                      const TwistVector& alpha_g) {
  Flow f = dimer_flow(g, d);
  Flow fa = angle_flow(g);
  for (size_t e = 0; e < f.val.size(); ++e) f.val[e] -= fa.val[e];
  auto p = period_vector(g, f, alpha_g);
  std::vector<long long> m(p.size());
  for (size_t j = 0; j < p.size(); ++j) {
    m[j] = std::llround(p[j]);
    if (std::abs(p[j] - double(m[j])) > 1e-9)
      throw Error("height periods are not integers (got " +
                  std::to_string(p[j]) + " on cycle " + std::to_string(j) +
                  "); check alpha_G");
  }
  return m;
}

int QuadFormChar::q0(const std::vector<long long>& ma,
                     const std::vector<long long>& mb) const {
  long long s = 0;
  for (size_t i = 0; i < a2.size(); ++i)
    s += ma[i] * mb[i] + a2[i] * mb[i] + b2[i] * ma[i];
  return int(imod(s, 2));
}

int QuadFormChar::arf_shifted(unsigned l) const {
  int gg = g();
  int s = 0;
  for (int i = 0; i < gg; ++i) {
    int qa = (a2[i] + ((l >> i) & 1)) & 1;
    int qb = (b2[i] + ((l >> (gg + i)) & 1)) & 1;
    s ^= qa & qb;
  }
  return s;
}

QuadFormChar q0_characteristics(const FlatSurface& s, const HomologyBasis& basis,
                                const CutSystem& cuts) {
  QuadFormChar c;
  c.a2.resize(basis.g);
  c.b2.resize(basis.g);
  for (int i = 0; i < basis.g; ++i) {
    c.a2[i] = q0_of_walk(s, cuts, basis.cycles[i]);
    c.b2[i] = q0_of_walk(s, cuts, basis.cycles[basis.g + i]);
  }
  return c;
}

Calibration calibrate_q0(const KasteleynMatrix& k) {
  const DimerGraph& g = k.graph();
  int gen = g.genus;
  if (g.whites.size() > 18)
    throw Error("calibrate_q0: graph too large for enumeration");
  struct Sector {
    std::vector<long long> m;
    double weight;
  };
  // aggregate covers by period vector
  std::map<std::vector<long long>, double> sectors;
  bool complete = enumerate_matchings(g, size_t(2e7), [&](const DimerCover& d) {
    double w = 1.0;
    for (int e : d.edge_of_white) w *= g.edges[e].weight;
    auto m = height_periods(g, d, k.gauge_form());
    sectors[m] += w;
  });
  if (!complete) throw Error("calibrate_q0: enumeration truncated");
  if (sectors.empty()) throw Error("calibrate_q0: no dimer covers");
  unsigned count = 1u << (2 * gen);
  std::vector<cplx> dets(count), corr(count);
  parallel_for(count, [&](size_t l) {
    TwistVector tw = TwistVector::half_class(gen, unsigned(l));
    dets[l] = k.twisted(tw).det();
    corr[l] = twist_correction(g, k.gauge_form(), tw);
  });
  std::vector<QuadFormChar> matches;
  cplx eps_match;
  for (unsigned cand = 0; cand < count; ++cand) {
    QuadFormChar q;
    q.a2.resize(gen);
    q.b2.resize(gen);
    for (int i = 0; i < gen; ++i) {
      q.a2[i] = (cand >> i) & 1;
      q.b2[i] = (cand >> (gen + i)) & 1;
    }
    // predicted expansion for every half-period twist
    cplx eps(0, 0);
    bool ok = true;
    double scale = 0.0;
    for (const auto& [m, w] : sectors) scale += w;
    for (unsigned l = 0; l < count && ok; ++l) {
      cplx sum = 0.0;
      for (const auto& [m, w] : sectors) {
        std::vector<long long> ma(m.begin(), m.begin() + gen);
        std::vector<long long> mb(m.begin() + gen, m.end());
        double phase = kPi * q.q0(ma, mb);
        double tphase = 0.0;
        for (int j = 0; j < gen; ++j) {
          double al = ((l >> j) & 1) * 0.5;
          double bl = ((l >> (gen + j)) & 1) * 0.5;
          tphase += al * double(mb[j]) - bl * double(ma[j]);
        }
        sum += w * std::polar(1.0, phase + 2 * kPi * tphase);
      }
      cplx lhs = dets[l] / corr[l];
      if (std::abs(sum) < 1e-12 * scale) {
        if (std::abs(lhs) > 1e-8 * scale) ok = false;
        continue;
      }
      cplx e = lhs / sum;
      if (std::abs(std::abs(e) - 1.0) > 1e-8) {
        ok = false;
        continue;
      }
      if (std::abs(eps) == 0.0)
        eps = e;
      else if (std::abs(e - eps) > 1e-8)
        ok = false;
    }
    if (ok && std::abs(eps) > 0.5) {
      matches.push_back(q);
      eps_match = eps;
    }
  }
  if (matches.empty())
    throw Error("calibrate_q0: no characteristics match the determinant "
                "expansion (crossing-convention bug)");
  if (matches.size() > 1)
    throw Error("calibrate_q0: characteristics are not unique on this graph");
  return Calibration{matches.front(), eps_match};
}

std::map<std::vector<long long>, double> sector_distribution(
    const KasteleynMatrix& k, const QuadFormChar& q0, int bound) {
  const DimerGraph& g = k.graph();
  int gen = g.genus;
  ZTable zt = signed_partition_functions(k, q0);
  int L = 2 * bound + 1;
  size_t grid = 1;
  for (int j = 0; j < 2 * gen; ++j) {
    grid *= size_t(L);
    if (grid > (size_t(1) << 40)) throw Error("sector grid too large");
  }
  // F(t) over the grid
  std::vector<cplx> f(grid);
  parallel_for(grid, [&](size_t idx) {
    TwistVector t = TwistVector::zero(gen);
    size_t r = idx;
    for (int j = 0; j < gen; ++j) {
      t.a[j] = double(r % L) / L;
      r /= L;
    }
    for (int j = 0; j < gen; ++j) {
      t.b[j] = double(r % L) / L;
      r /= L;
    }
    Sdet det = lu_det_scaled(k.twisted(t).dense());
    cplx rel = det.zero() ? cplx(0, 0)
                          : det.unit() * std::exp2(det.log2_abs() - zt.log2_z);
    f[idx] = rel / (twist_correction(g, k.gauge_form(), t) * zt.eps);
  });
  // inverse DFT: w_m = L^{-2g} sum_t F(t) exp(-2 pi i (a.mB - b.mA))
  std::map<std::vector<long long>, double> out;
  std::vector<long long> m(2 * gen, -bound);
  double boundary_mass = 0.0, total = 0.0;
  for (;;) {
    cplx acc = 0.0;
    for (size_t idx = 0; idx < grid; ++idx) {
      size_t r = idx;
      double expo = 0.0;
      for (int j = 0; j < gen; ++j) {
        expo -= double(r % L) / L * double(m[gen + j]);
        r /= L;
      }
      for (int j = 0; j < gen; ++j) {
        expo += double(r % L) / L * double(m[j]);
        r /= L;
      }
      acc += f[idx] * std::polar(1.0, 2 * kPi * expo);
    }
    acc /= double(grid);
    std::vector<long long> ma(m.begin(), m.begin() + gen);
    std::vector<long long> mb(m.begin() + gen, m.end());
    double p = std::real(acc * std::polar(1.0, -kPi * q0.q0(ma, mb)));
    if (std::abs(std::imag(acc)) > 1e-8)
      throw Error("sector inversion: non-real weight");
    if (p > 1e-12) {
      out[m] = p;
      total += p;
      bool on_bd = false;
      for (auto x : m)
        if (std::llabs(x) == bound) on_bd = true;
      if (on_bd) boundary_mass += p;
    } else if (p < -1e-8) {
      throw Error("sector inversion: negative probability (aliasing: "
                  "increase the bound)");
    }
    int j = 0;
    while (j < 2 * gen && m[j] == bound) {
      m[j] = -bound;
      ++j;
    }
    if (j == 2 * gen) break;
    ++m[j];
  }
  if (boundary_mass > 1e-9)
    throw Error("sector distribution: aliasing detected, increase the bound");
  if (std::abs(total - 1.0) > 1e-8)
    throw Error("sector distribution: probabilities sum to " +
                std::to_string(total));
  return out;
}

}  // namespace flatdimers

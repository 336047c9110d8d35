#include "flatdimers/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace flatdimers {

namespace {

struct Complex2D {
  const FlatSurface* s;
  int m, nsq, ncells, nedges, nverts;
  MeshIndex mi;
  std::vector<int> eu, ev;   // oriented edge endpoints (vertex classes)
  std::vector<double> w;     // conductances
  double wx, wy, wd;

  Complex2D(const FlatSurface& surf, int mesh)
      : s(&surf), m(mesh), nsq(surf.squares()), mi(surf, mesh) {
    ncells = nsq * m * m;
    nedges = 3 * ncells;
    nverts = mi.count();
    // cotangent conductances of the (tau - 1)-diagonal split; both triangles
    // are congruent, so each edge class gets cot of its opposite angle.
    cplx tau = surf.cell_tau();
    auto angle = [](cplx at, cplx p, cplx q) {
      return std::abs(std::arg((p - at) / (q - at)));
    };
    cplx p00(0, 0), p10(1, 0), p01 = tau;
    double ax = angle(p01, p00, p10);  // opposite the x-edge
    double ay = angle(p10, p00, p01);  // opposite the y-edge
    double ad = angle(p00, p10, p01);  // opposite the diagonal
    wx = 1.0 / std::tan(ax);
    wy = 1.0 / std::tan(ay);
    wd = 1.0 / std::tan(ad);
    if (std::abs(wd) < 1e-14) wd = 0.0;
    eu.resize(nedges);
    ev.resize(nedges);
    w.resize(nedges);
    for (int sq = 0; sq < nsq; ++sq)
      for (int cy = 0; cy < m; ++cy)
        for (int cx = 0; cx < m; ++cx) {
          int c = cell(sq, cx, cy);
          eu[3 * c + 0] = mi.id(sq, cx, cy);
          ev[3 * c + 0] = mi.id(sq, cx + 1, cy);
          w[3 * c + 0] = wx;
          eu[3 * c + 1] = mi.id(sq, cx, cy);
          ev[3 * c + 1] = mi.id(sq, cx, cy + 1);
          w[3 * c + 1] = wy;
          eu[3 * c + 2] = mi.id(sq, cx + 1, cy);
          ev[3 * c + 2] = mi.id(sq, cx, cy + 1);
          w[3 * c + 2] = wd;
        }
  }
  int cell(int sq, int cx, int cy) const { return (sq * m + cy) * m + cx; }

  // canonical edge id and sign for a grid-walk step
  std::pair<int, int> step_edge(const Step& st) const {
    switch (st.dir) {
      case SideE: return {3 * cell(st.sq, st.gx, st.gy) + 0, +1};
      case SideW: return {3 * cell(st.sq, st.gx - 1, st.gy) + 0, -1};
      case SideN: return {3 * cell(st.sq, st.gx, st.gy) + 1, +1};
      default: return {3 * cell(st.sq, st.gx, st.gy - 1) + 1, -1};
    }
  }
};

// crossings of the offset polyline of C with one axis-aligned or diagonal
// segment; offset segments are prebuilt and grouped by chart
struct OffsetIndex {
  std::map<int, std::vector<ChartSeg>> by_chart;
  explicit OffsetIndex(const FlatSurface& s, const GridWalk& c) {
    for (auto& seg : offset_segments(s, c)) by_chart[seg.sq].push_back(seg);
  }
};

// signed crossings sign(det[d_e, d_C]) of a straight piece (axis or diagonal)
long long cross_piece(const OffsetIndex& oi, int sq, long long x0, long long y0,
                      long long x1, long long y1) {
  auto it = oi.by_chart.find(sq);
  if (it == oi.by_chart.end()) return 0;
  long long total = 0;
  bool horiz = (y0 == y1), vert = (x0 == x1);
  for (const auto& o : it->second) {
    bool oh = (o.y0 == o.y1);
    if (horiz) {
      if (oh) continue;
      long long lo = std::min(x0, x1), hi = std::max(x0, x1);
      bool span = (o.y1 > o.y0) ? (y0 >= o.y0 && y0 < o.y1)
                                : (y0 <= o.y0 && y0 > o.y1);
      if (o.x0 > lo && o.x0 < hi && span)
        total += -((x1 > x0) ? 1 : -1) * ((o.y1 > o.y0) ? 1 : -1) * -1;
      // det[d_e, d_C] = det[(dx,0),(0,dy)] = dx*dy
    } else if (vert) {
      if (!oh) continue;
      long long lo = std::min(y0, y1), hi = std::max(y0, y1);
      bool span = (o.x1 > o.x0) ? (x0 >= o.x0 && x0 < o.x1)
                                : (x0 <= o.x0 && x0 > o.x1);
      if (o.y0 > lo && o.y0 < hi && span)
        total += -((y1 > y0) ? 1 : -1) * ((o.x1 > o.x0) ? 1 : -1);
      // det[(0,dy),(dx,0)] = -dy*dx
    } else {
      // diagonal piece (dx = -(dy)); offset segments are axis-aligned
      long long dx = x1 - x0, dy = y1 - y0;
      if (oh) {
        // y = o.y0: parameter t with y0 + t*dy = o.y0
        if ((o.y0 - y0) * dy <= 0 || std::llabs(o.y0 - y0) >= std::llabs(dy))
          continue;
        // intersection x
        // dy divides? exactness: x = x0 + dx*(o.y0-y0)/dy; |dx|=|dy| so exact
        long long xi = x0 + dx * (o.y0 - y0) / dy;
        bool span = (o.x1 > o.x0) ? (xi >= o.x0 && xi < o.x1)
                                  : (xi <= o.x0 && xi > o.x1);
        if (span) {
          // det[(dx,dy),(dxC,0)] = -dy*dxC
          total += -((dy > 0) ? 1 : -1) * ((o.x1 > o.x0) ? 1 : -1);
        }
      } else {
        if ((o.x0 - x0) * dx <= 0 || std::llabs(o.x0 - x0) >= std::llabs(dx))
          continue;
        long long yi = y0 + dy * (o.x0 - x0) / dx;
        bool span = (o.y1 > o.y0) ? (yi >= o.y0 && yi < o.y1)
                                  : (yi <= o.y0 && yi > o.y1);
        if (span) {
          // det[(dx,dy),(0,dyC)] = dx*dyC
          total += ((dx > 0) ? 1 : -1) * ((o.y1 > o.y0) ? 1 : -1);
        }
      }
    }
  }
  return total;
}

// crossing cocycle of the x/y/diagonal edges of a cell with offset-C
void cell_cocycle(const Complex2D& cxp, const OffsetIndex& oi, int sq, int cx,
                  int cy, double out[3]) {
  long long X0 = 4LL * cx, Y0 = 4LL * cy;
  // x-edge P00->P10 and its south-neighbour representation
  long long x_total = cross_piece(oi, sq, X0, Y0, X0 + 4, Y0);
  if (cy == 0) {
    SideRef r = cxp.s->cross(sq, SideS);
    x_total += cross_piece(oi, r.sq, X0, 4LL * cxp.m, X0 + 4, 4LL * cxp.m);
  }
  long long y_total = cross_piece(oi, sq, X0, Y0, X0, Y0 + 4);
  if (cx == 0) {
    SideRef r = cxp.s->cross(sq, SideW);
    y_total += cross_piece(oi, r.sq, 4LL * cxp.m, Y0, 4LL * cxp.m, Y0 + 4);
  }
  long long d_total = cross_piece(oi, sq, X0 + 4, Y0, X0, Y0 + 4);
  out[0] = double(x_total);
  out[1] = double(y_total);
  out[2] = double(d_total);
}

struct Solved {
  std::vector<double> chi;   // raw cocycle
  std::vector<double> harm;  // harmonic representative
};

Solved solve_dual(const Complex2D& cxp, const GridWalk& c, double tol) {
  const FlatSurface& s = *cxp.s;
  OffsetIndex oi(s, c);
  std::vector<double> chi(cxp.nedges, 0.0);
  for (int sq = 0; sq < cxp.nsq; ++sq)
    for (int cy = 0; cy < cxp.m; ++cy)
      for (int cx = 0; cx < cxp.m; ++cx) {
        double v[3];
        cell_cocycle(cxp, oi, sq, cx, cy, v);
        int c3 = 3 * cxp.cell(sq, cx, cy);
        chi[c3] = v[0];
        chi[c3 + 1] = v[1];
        chi[c3 + 2] = v[2];
      }
  // check closedness on both triangles of each cell: the diagonal carries the
  // crossings that make both routes agree; repair is not attempted
  for (int sq = 0; sq < cxp.nsq; ++sq)
    for (int cy = 0; cy < cxp.m; ++cy)
      for (int cx = 0; cx < cxp.m; ++cx) {
        int c3 = 3 * cxp.cell(sq, cx, cy);
        // T1: P00->P10 (x), P10->P01 (diag), P01->P00 (-y)
        double t1 = chi[c3] + chi[c3 + 2] - chi[c3 + 1];
        if (std::abs(t1) > 1e-9)
          throw Error("harmonic basis: crossing cocycle is not closed");
      }
  // weighted divergence and Laplace solve
  SparseSym lap;
  lap.n = cxp.nverts;
  std::vector<std::map<int, double>> rows(cxp.nverts);
  for (int e = 0; e < cxp.nedges; ++e) {
    if (cxp.w[e] == 0.0) continue;
    int u = cxp.eu[e], v = cxp.ev[e];
    rows[u][u] += cxp.w[e];
    rows[v][v] += cxp.w[e];
    rows[u][v] -= cxp.w[e];
    rows[v][u] -= cxp.w[e];
  }
  lap.rowptr.push_back(0);
  for (int i = 0; i < cxp.nverts; ++i) {
    for (auto& [j, val] : rows[i]) {
      lap.col.push_back(j);
      lap.val.push_back(val);
    }
    lap.rowptr.push_back(int(lap.col.size()));
  }
  std::vector<double> div(cxp.nverts, 0.0);
  for (int e = 0; e < cxp.nedges; ++e) {
    div[cxp.eu[e]] += cxp.w[e] * chi[e];
    div[cxp.ev[e]] -= cxp.w[e] * chi[e];
  }
  double mean = 0.0;
  for (double d : div) mean += d;
  mean /= cxp.nverts;
  for (double& d : div) d -= mean;
  std::vector<double> phi;
  conjugate_gradient(lap, div, phi, tol, 20 * cxp.nverts + 1000);
  Solved out;
  out.chi = chi;
  out.harm.resize(cxp.nedges);
  for (int e = 0; e < cxp.nedges; ++e)
    out.harm[e] = chi[e] - (phi[cxp.eu[e]] - phi[cxp.ev[e]]);
  return out;
}

double flux_through(const Complex2D& cxp, const OffsetIndex& oi,
                    const std::vector<double>& h) {
  double total = 0.0;
  for (int sq = 0; sq < cxp.nsq; ++sq)
    for (int cy = 0; cy < cxp.m; ++cy)
      for (int cx = 0; cx < cxp.m; ++cx) {
        double v[3];
        cell_cocycle(cxp, oi, sq, cx, cy, v);
        int c3 = 3 * cxp.cell(sq, cx, cy);
        for (int t = 0; t < 3; ++t)
          if (v[t] != 0.0) total += cxp.w[c3 + t] * h[c3 + t] * v[t];
      }
  return total;
}

double residual_closed(const Complex2D& cxp, const std::vector<double>& h) {
  double r = 0.0;
  for (int c = 0; c < cxp.ncells; ++c) {
    double t1 = h[3 * c] + h[3 * c + 2] - h[3 * c + 1];
    r = std::max(r, std::abs(t1));
  }
  return r;
}

double residual_coclosed(const Complex2D& cxp, const std::vector<double>& h) {
  std::vector<double> div(cxp.nverts, 0.0);
  for (int e = 0; e < cxp.nedges; ++e) {
    div[cxp.eu[e]] += cxp.w[e] * h[e];
    div[cxp.ev[e]] -= cxp.w[e] * h[e];
  }
  double r = 0.0;
  for (double d : div) r = std::max(r, std::abs(d));
  return r;
}

}  // namespace

std::vector<Harmonic1Form> harmonic_basis(const FlatSurface& s,
                                          const HomologyBasis& basis, int mesh,
                                          double tol) {
  if (mesh < 2 || mesh % 2) throw Error("harmonic_basis: mesh must be even >= 2");
  Complex2D cxp(s, mesh);
  std::vector<GridWalk> cycles;
  for (const auto& c : basis.cycles) cycles.push_back(subdivide(c, mesh / c.mesh));
  std::vector<Harmonic1Form> forms(cycles.size());
  parallel_for(cycles.size(), [&](size_t j) {
    Solved sol = solve_dual(cxp, cycles[j], tol);
    Harmonic1Form f;
    f.mesh = mesh;
    f.val = std::move(sol.harm);
    f.closed_residual = residual_closed(cxp, f.val);
    f.coclosed_residual = residual_coclosed(cxp, f.val);
    forms[j] = std::move(f);
  });
  return forms;
}

std::vector<std::vector<double>> harmonic_periods(
    const FlatSurface& s, const HomologyBasis& basis, int mesh,
    const std::vector<Harmonic1Form>& forms) {
  Complex2D cxp(s, mesh);
  std::vector<GridWalk> cycles;
  for (const auto& c : basis.cycles) cycles.push_back(subdivide(c, mesh / c.mesh));
  std::vector<std::vector<double>> p(forms.size(),
                                     std::vector<double>(cycles.size(), 0.0));
  for (size_t j = 0; j < forms.size(); ++j)
    for (size_t c = 0; c < cycles.size(); ++c) {
      double acc = 0.0;
      for (const Step& st : cycles[c].steps) {
        auto [e, sgn] = cxp.step_edge(st);
        acc += sgn * forms[j].val[e];
      }
      p[j][c] = acc;
    }
  return p;
}

PeriodMatrix period_matrix_at_mesh(const FlatSurface& s,
                                   const HomologyBasis& basis, int mesh) {
  int g = basis.g;
  Complex2D cxp(s, mesh);
  std::vector<GridWalk> cycles;
  for (const auto& c : basis.cycles) cycles.push_back(subdivide(c, mesh / c.mesh));
  auto forms = harmonic_basis(s, basis, mesh);
  // holomorphic forms from the duals of the B cycles: w_j = u_j + i * u_j
  // with periods Int_C w = Int_C u + i Flux_C(u)
  std::vector<OffsetIndex> oidx;
  oidx.reserve(2 * g);
  for (int c = 0; c < 2 * g; ++c) oidx.emplace_back(s, cycles[c]);
  Mat pa(g, g), pb(g, g);
  for (int j = 0; j < g; ++j) {
    const auto& u = forms[g + j].val;  // dual of B_j
    for (int c = 0; c < g; ++c) {
      double line_a = 0.0, line_b = 0.0;
      for (const Step& st : cycles[c].steps) {
        auto [e, sgn] = cxp.step_edge(st);
        line_a += sgn * u[e];
      }
      for (const Step& st : cycles[g + c].steps) {
        auto [e, sgn] = cxp.step_edge(st);
        line_b += sgn * u[e];
      }
      pa(c, j) = cplx(line_a, flux_through(cxp, oidx[c], u));
      pb(c, j) = cplx(line_b, flux_through(cxp, oidx[g + c], u));
    }
  }
  // normalize A-periods to the identity
  Mat omega = solve(pa, pb);
  PeriodMatrix pm;
  pm.mesh = mesh;
  pm.omega = omega;
  double sym = 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) sym = std::max(sym, std::abs(omega(i, j) - omega(j, i)));
  pm.sym_residual = sym;
  std::vector<double> im(size_t(g) * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      im[size_t(i) * g + j] = 0.5 * (std::imag(omega(i, j)) + std::imag(omega(j, i)));
  pm.im_positive = is_positive_definite(im, g);
  // Riemann bilinear residual: Im Omega_{ik} vs (i/2) Int w_i ^ conj(w_k)
  // computed from the raw B-duals through two independent pairings:
  //   S_{jl} = Int u_j ^ *u_l  (conductance inner product, exact discretely)
  //   W_{jl} = Int u_j ^ u_l   (Whitney wedge over the split triangles)
  // For w_i = sum_j c_{ji} (u_j + i *u_j) with PA * c = I:
  //   (i/2) Int w_i ^ conj(w_k) = sum_{jl} c_{ji} conj(c_{lk}) (S_{jl} + i W_{jl}).
  {
    Mat c = lu_inverse(pa);
    std::vector<std::vector<double>> su(g, std::vector<double>(g, 0.0));
    std::vector<std::vector<double>> wu(g, std::vector<double>(g, 0.0));
    auto neighbour_cell = [&](int sq, int cx, int cy, Side d) {
      int nx = cx + (d == SideE ? 1 : 0), ny = cy + (d == SideN ? 1 : 0);
      if (nx < cxp.m && ny < cxp.m) return cxp.cell(sq, nx, ny);
      SideRef r = s.cross(sq, d);
      return d == SideE ? cxp.cell(r.sq, 0, cy) : cxp.cell(r.sq, cx, 0);
    };
    for (int j = 0; j < g; ++j)
      for (int l = 0; l < g; ++l) {
        const auto& uj = forms[g + j].val;
        const auto& ul = forms[g + l].val;
        double sjl = 0.0;
        for (int e = 0; e < cxp.nedges; ++e) sjl += cxp.w[e] * uj[e] * ul[e];
        su[j][l] = sjl;
        double wjl = 0.0;
        auto tri = [&](double a1, double a2, double a3, double b1, double b2,
                       double b3) {
          return ((a1 * b2 - a2 * b1) + (a2 * b3 - a3 * b2) +
                  (a3 * b1 - a1 * b3)) /
                 6.0;
        };
        for (int sq = 0; sq < cxp.nsq; ++sq)
          for (int cy = 0; cy < cxp.m; ++cy)
            for (int cx = 0; cx < cxp.m; ++cx) {
              int c0 = cxp.cell(sq, cx, cy);
              int ce = neighbour_cell(sq, cx, cy, SideE);
              int cn = neighbour_cell(sq, cx, cy, SideN);
              // T1 = (P00,P10,P01): +x, +diag, -y
              wjl += tri(uj[3 * c0], uj[3 * c0 + 2], -uj[3 * c0 + 1],
                         ul[3 * c0], ul[3 * c0 + 2], -ul[3 * c0 + 1]);
              // T2 = (P10,P11,P01): +y(east cell), -x(north cell), -diag
              wjl += tri(uj[3 * ce + 1], -uj[3 * cn], -uj[3 * c0 + 2],
                         ul[3 * ce + 1], -ul[3 * cn], -ul[3 * c0 + 2]);
            }
        wu[j][l] = wjl;
      }
    double bil = 0.0;
    for (int i = 0; i < g; ++i)
      for (int kk = 0; kk < g; ++kk) {
        cplx acc = 0.0;
        for (int j = 0; j < g; ++j)
          for (int l = 0; l < g; ++l)
            acc += c(j, i) * std::conj(c(l, kk)) * cplx(su[j][l], wu[j][l]);
        bil = std::max(bil, std::abs(acc - cplx(im[size_t(i) * g + kk], 0.0)));
      }
    pm.bilinear_residual = bil;
  }
  return pm;
}

PeriodMatrixResult period_matrix(const FlatSurface& s, const HomologyBasis& basis,
                                 int mesh, bool check_gate) {
  PeriodMatrixResult r;
  r.coarse = period_matrix_at_mesh(s, basis, mesh / 2);
  r.fine = period_matrix_at_mesh(s, basis, mesh);
  int g = basis.g;
  r.omega = Mat(g, g);
  double dc = 0.0, df = 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      r.omega(i, j) = 2.0 * r.fine.omega(i, j) - r.coarse.omega(i, j);
      df = std::max(df, std::abs(r.fine.omega(i, j) - r.coarse.omega(i, j)));
    }
  (void)dc;
  r.doubling_ratio = df;
  if (check_gate && df > 0.5)
    throw Error("period matrix: mesh-doubling gate failed");
  return r;
}

}  // namespace flatdimers

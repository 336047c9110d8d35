#include "flatdimers/graph.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace flatdimers {

namespace {

constexpr int DX[4] = {1, 0, -1, 0};
constexpr int DY[4] = {0, 1, 0, -1};

// CCW fan of grid cells around a mesh vertex: entries (sq, cx, cy, corner)
// with the vertex sitting at `corner` of cell (cx, cy).
std::vector<std::array<int, 4>> cell_fan(const FlatSurface& s, int mesh, int sq,
                                         int gx, int gy) {
  int m = mesh;
  int csq = sq, cx = gx, cy = gy;
  if (cx == m) {
    SideRef r = s.cross(csq, SideE);
    csq = r.sq;
    cx = 0;
  }
  if (cy == m) {
    SideRef r = s.cross(csq, SideN);
    csq = r.sq;
    cy = 0;
  }
  auto ccw_exit = [](int c) {
    switch (c) {
      case CSW: return SideW;
      case CSE: return SideS;
      case CNE: return SideE;
      default: return SideN;
    }
  };
  auto entry_corner = [](Side sd) {
    switch (sd) {
      case SideE: return int(CSE);
      case SideN: return int(CNE);
      case SideW: return int(CNW);
      default: return int(CSW);
    }
  };
  std::vector<std::array<int, 4>> fan;
  int p = csq, x = cx, y = cy, c = CSW;
  do {
    fan.push_back({p, x, y, c});
    Side exit = ccw_exit(Corner(c));
    int nx = x + DX[int(exit)], ny = y + DY[int(exit)];
    if (nx >= 0 && nx < m && ny >= 0 && ny < m) {
      x = nx;
      y = ny;
      c = entry_corner(opposite(exit));
    } else {
      SideRef r = s.cross(p, exit);
      p = r.sq;
      switch (exit) {
        case SideE: x = 0; break;
        case SideW: x = m - 1; break;
        case SideN: y = 0; break;
        case SideS: y = m - 1; break;
      }
      c = entry_corner(r.side);
    }
  } while (!(p == csq && x == cx && y == cy && c == CSW));
  return fan;
}

}  // namespace

bool DimerCover::valid(const DimerGraph& g) const {
  if (edge_of_white.size() != g.whites.size()) return false;
  std::vector<char> bused(g.verts.size(), 0);
  for (size_t wi = 0; wi < g.whites.size(); ++wi) {
    int e = edge_of_white[wi];
    if (e < 0 || e >= int(g.edges.size())) return false;
    if (g.edges[e].w != g.whites[wi]) return false;
    if (bused[g.edges[e].b]) return false;
    bused[g.edges[e].b] = 1;
  }
  return true;
}

DimerGraph build_pillow_square(std::shared_ptr<const FlatSurface> s, int n) {
  if (n < 1) throw Error("build_pillow_square: n must be positive");
  if (!s->holonomy_trivial())
    throw Error("build_pillow_square: surface has non-trivial holonomy");
  if (!s->all_cones_4pi())
    throw Error("build_pillow_square: cone angles must all be 4*pi");
  if (std::abs(s->cell_tau() - cplx(0, 1)) > 1e-12)
    throw Error("build_pillow_square: square cells required");
  DimerGraph g;
  g.family = DimerGraph::Family::SquarePillow;
  g.param = n;
  g.surf = s;
  g.genus = s->genus();
  int m = 2 * n;
  int nsq = s->squares();
  double h = 1.0 / m;
  auto vid = [&](int sq, int cx, int cy) { return (sq * m + cy) * m + cx; };
  g.verts.resize(size_t(nsq) * m * m);
  for (int p = 0; p < nsq; ++p)
    for (int cy = 0; cy < m; ++cy)
      for (int cx = 0; cx < m; ++cx) {
        GVert v;
        v.sq = p;
        v.cx = cx;
        v.cy = cy;
        v.white = ((cx + cy) % 2 == 0);
        v.pos = cplx((cx + 0.5) * h, (cy + 0.5) * h);
        g.verts[vid(p, cx, cy)] = v;
      }
  std::map<std::tuple<int, int, int, int>, int> side_edge;  // (sq,cx,cy,E=0/N=1)
  long long top = 4LL * m;
  auto reverse_pieces = [](std::vector<ChartSeg> p) {
    std::vector<ChartSeg> r;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
      r.push_back(ChartSeg{it->sq, it->x1, it->y1, it->x0, it->y0});
    return r;
  };
  for (int p = 0; p < nsq; ++p)
    for (int cy = 0; cy < m; ++cy)
      for (int cx = 0; cx < m; ++cx) {
        int u = vid(p, cx, cy);
        long long ux = 4LL * cx + 2, uy = 4LL * cy + 2;
        int ve;
        std::vector<ChartSeg> pieces_e;  // directed u -> east neighbour
        if (cx + 1 < m) {
          ve = vid(p, cx + 1, cy);
          pieces_e.push_back(ChartSeg{p, ux, uy, ux + 4, uy});
        } else {
          SideRef r = s->cross(p, SideE);
          ve = vid(r.sq, 0, cy);
          pieces_e.push_back(ChartSeg{p, ux, uy, top, uy});
          pieces_e.push_back(ChartSeg{r.sq, 0, uy, 2, uy});
        }
        {
          GEdge e;
          bool uw = g.verts[u].white;
          if (uw == g.verts[ve].white)
            throw Error("internal: checkerboard inconsistency across a gluing");
          e.w = uw ? u : ve;
          e.b = uw ? ve : u;
          e.weight = h;
          e.kgeom = uw ? cplx(0, h) : cplx(0, -h);  // white face on the left
          e.f_angle = 0.25;
          e.pieces = uw ? pieces_e : reverse_pieces(pieces_e);
          side_edge[{p, cx, cy, 0}] = int(g.edges.size());
          g.edges.push_back(e);
        }
        int vn;
        std::vector<ChartSeg> pieces_n;
        if (cy + 1 < m) {
          vn = vid(p, cx, cy + 1);
          pieces_n.push_back(ChartSeg{p, ux, uy, ux, uy + 4});
        } else {
          SideRef r = s->cross(p, SideN);
          vn = vid(r.sq, cx, 0);
          pieces_n.push_back(ChartSeg{p, ux, uy, ux, top});
          pieces_n.push_back(ChartSeg{r.sq, ux, 0, ux, 2});
        }
        {
          GEdge e;
          bool uw = g.verts[u].white;
          e.w = uw ? u : vn;
          e.b = uw ? vn : u;
          e.weight = h;
          e.kgeom = uw ? cplx(-h, 0) : cplx(h, 0);
          e.f_angle = 0.25;
          e.pieces = uw ? pieces_n : reverse_pieces(pieces_n);
          side_edge[{p, cx, cy, 1}] = int(g.edges.size());
          g.edges.push_back(e);
        }
      }
  // faces around dual vertices (grid corner classes at mesh m)
  MeshIndex mi(*s, m);
  std::vector<char> seen(mi.count(), 0);
  for (int p = 0; p < nsq; ++p)
    for (int gy = 0; gy < m; ++gy)
      for (int gx = 0; gx < m; ++gx) {
        int dv = mi.id(p, gx, gy);
        if (seen[dv]) continue;
        seen[dv] = 1;
        auto fan = cell_fan(*s, m, p, gx, gy);
        Face f;
        f.cone = mi.is_cone(dv);
        if (f.cone && fan.size() != 8)
          throw Error("internal: cone face is not an octagon");
        if (!f.cone && fan.size() != 4)
          throw Error("internal: regular face is not a quad");
        for (size_t i = 0; i < fan.size(); ++i) {
          auto [cp, cx, cy, cc] = fan[i];
          f.verts.push_back(vid(cp, cx, cy));
          Side exit = (cc == CSW)   ? SideW
                      : (cc == CSE) ? SideS
                      : (cc == CNE) ? SideE
                                    : SideN;
          int key_sq = cp, kx = cx, ky = cy, kind = 0;
          switch (exit) {
            case SideE: kind = 0; break;
            case SideN: kind = 1; break;
            case SideW:
              kind = 0;
              if (cx > 0) {
                kx = cx - 1;
              } else {
                SideRef r = s->cross(cp, SideW);
                key_sq = r.sq;
                kx = m - 1;
              }
              break;
            case SideS:
              kind = 1;
              if (cy > 0) {
                ky = cy - 1;
              } else {
                SideRef r = s->cross(cp, SideS);
                key_sq = r.sq;
                ky = m - 1;
              }
              break;
          }
          f.edges.push_back(side_edge.at({key_sq, kx, ky, kind}));
        }
        g.faces.push_back(std::move(f));
      }
  g.vedges.assign(g.verts.size(), {});
  for (size_t e = 0; e < g.edges.size(); ++e) {
    g.vedges[g.edges[e].w].push_back(int(e));
    g.vedges[g.edges[e].b].push_back(int(e));
  }
  for (size_t v = 0; v < g.verts.size(); ++v)
    (g.verts[v].white ? g.whites : g.blacks).push_back(int(v));
  if (g.whites.size() != g.blacks.size())
    throw Error("internal: bipartite classes differ in size");
  return g;
}

DimerGraph build_torus_hex(int N) {
  if (N < 1) throw Error("build_torus_hex: N must be positive");
  auto surf = std::make_shared<FlatSurface>(
      make_single_cell_torus(std::polar(1.0, kPi / 3)));
  DimerGraph g;
  g.family = DimerGraph::Family::HexTorus;
  g.param = N;
  g.surf = surf;
  g.genus = 1;
  cplx tau = surf->cell_tau();
  // (s,t) cell coordinates in units of 1/(3N): white (up-triangle centers)
  // at (3j+1, 3k+1), black (down-triangle centers) at (3j+2, 3k+2).
  auto widx = [&](int j, int k) { return imod(k, N) * N + imod(j, N); };
  auto bidx = [&](int j, int k) {
    return N * N + imod(k, N) * N + imod(j, N);
  };
  g.verts.resize(2 * size_t(N) * N);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      GVert w{0, 3 * j + 1, 3 * k + 1, true, cplx()};
      w.pos = (cplx(w.cx, 0) + tau * cplx(w.cy, 0)) / (3.0 * N);
      g.verts[widx(j, k)] = w;
      GVert b{0, 3 * j + 2, 3 * k + 2, false, cplx()};
      b.pos = (cplx(b.cx, 0) + tau * cplx(b.cy, 0)) / (3.0 * N);
      g.verts[bidx(j, k)] = b;
    }
  // Per white w_{jk}, edges of kinds 0,1,2 (order fixed; crossing_data relies
  // on edge id = 3*(k*N+j)+kind):
  //   kind 0: b_{j,k},   displacement (+1,+1)/(3N), kgeom e^{2pi i/3}/N
  //   kind 1: b_{j-1,k}, displacement (-2,+1)/(3N), kgeom e^{4pi i/3}/N
  //   kind 2: b_{j,k-1}, displacement (+1,-2)/(3N), kgeom 1/N
  std::map<std::tuple<int, int, int>, int> hex_edge;
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      auto add = [&](int kind, int bj, int bk, cplx kg) {
        GEdge e;
        e.w = widx(j, k);
        e.b = bidx(bj, bk);
        e.weight = 1.0 / N;
        e.kgeom = kg;
        e.f_angle = 1.0 / 3.0;
        hex_edge[{j, k, kind}] = int(g.edges.size());
        g.edges.push_back(e);
      };
      add(0, j, k, std::polar(1.0 / N, 2 * kPi / 3));
      add(1, j - 1, k, std::polar(1.0 / N, 4 * kPi / 3));
      add(2, j, k - 1, cplx(1.0 / N, 0));
    }
  // hexagon faces around triangular-lattice vertices v_{jk}, CCW
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      Face f;
      f.verts = {widx(j, k),         bidx(j - 1, k), widx(j - 1, k),
                 bidx(j - 1, k - 1), widx(j, k - 1), bidx(j, k - 1)};
      f.edges = {hex_edge.at({j, k, 1}),
                 hex_edge.at({imod(j - 1, N), k, 0}),
                 hex_edge.at({imod(j - 1, N), k, 2}),
                 hex_edge.at({j, imod(k - 1, N), 1}),
                 hex_edge.at({j, imod(k - 1, N), 0}),
                 hex_edge.at({j, k, 2})};
      g.faces.push_back(std::move(f));
    }
  g.vedges.assign(g.verts.size(), {});
  for (size_t e = 0; e < g.edges.size(); ++e) {
    g.vedges[g.edges[e].w].push_back(int(e));
    g.vedges[g.edges[e].b].push_back(int(e));
  }
  for (size_t v = 0; v < g.verts.size(); ++v)
    (g.verts[v].white ? g.whites : g.blacks).push_back(int(v));
  return g;
}

HomologyBasis graph_basis(const DimerGraph& g) {
  const FlatSurface& s = *g.surf;
  if (g.family == DimerGraph::Family::HexTorus) {
    HomologyBasis basis;
    basis.g = 1;
    GridWalker a(s, 2, 0, 0, 0);
    a.move(SideE);
    a.move(SideE);
    GridWalker b(s, 2, 0, 0, 0);
    b.move(SideN);
    b.move(SideN);
    basis.cycles = {a.take(), b.take()};
    basis.intersection = {{0, 1}, {-1, 0}};
    return basis;
  }
  return homology_basis(s);
}

void crossing_data(DimerGraph& g, const HomologyBasis& basis,
                   const CutSystem& cuts) {
  const FlatSurface& s = *g.surf;
  int g2 = 2 * basis.g;
  if (g.family == DimerGraph::Family::HexTorus) {
    // A runs at t=0 in the +s direction, B at s=0 in +t; an edge crossing a
    // line contributes sign(det[d_e, d_C]).
    int N = g.param, M = 3 * N;
    static const int DS[3] = {1, -2, 1};
    static const int DT[3] = {1, 1, -2};
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
      GEdge& e = g.edges[ei];
      int kind = int(ei % 3);
      const GVert& w = g.verts[e.w];
      int ds = DS[kind], dt = DT[kind];
      int hits_a = (dt > 0) ? (w.cy + dt > M ? 1 : 0) : (w.cy + dt < 0 ? 1 : 0);
      int hits_b = (ds > 0) ? (w.cx + ds > M ? 1 : 0) : (w.cx + ds < 0 ? 1 : 0);
      e.cross.assign(2, 0);
      e.cross[0] = hits_a * (dt > 0 ? -1 : 1);
      e.cross[1] = hits_b * (ds > 0 ? 1 : -1);
      e.cut_cross = 0;
    }
  } else {
    int m = 2 * g.param;
    std::vector<GridWalk> cycles;
    for (const auto& c : basis.cycles)
      cycles.push_back(subdivide(c, m / c.mesh));
    std::vector<GridWalk> cutw;
    for (const auto& c : cuts.cuts) cutw.push_back(subdivide(c, m / c.mesh));
    for (auto& e : g.edges) {
      e.cross.assign(g2, 0);
      for (int j = 0; j < g2; ++j)
        e.cross[j] = crossings_with_walk(s, cycles[j], e.pieces);
      e.cut_cross = 0;
      for (const auto& cw : cutw)
        e.cut_cross += crossings_with_walk(s, cw, e.pieces);
    }
  }
  g.fA_flux.assign(g2, 0.0);
  for (const auto& e : g.edges)
    for (int j = 0; j < g2; ++j) g.fA_flux[j] += double(e.cross[j]) * e.f_angle;
  g.has_crossings = true;
}

}  // namespace flatdimers

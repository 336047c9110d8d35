#include <algorithm>
#include <cmath>
#include <map>

#include "flatdimers/surface.hpp"

namespace flatdimers {

namespace {

constexpr int DX[4] = {1, 0, -1, 0};
constexpr int DY[4] = {0, 1, 0, -1};

// Chart re-entry keeping the point fixed: crossing side sd of square sq.
void recross(const FlatSurface& s, int& sq, int& gx, int& gy, Side sd, int m) {
  SideRef r = s.cross(sq, sd);
  sq = r.sq;
  switch (sd) {
    case SideE: gx = 0; break;
    case SideW: gx = m; break;
    case SideN: gy = 0; break;
    case SideS: gy = m; break;
  }
}

}  // namespace

Step make_step(const FlatSurface& s, int mesh, int sq, int gx, int gy,
               Side d) {
  int m = mesh;
  if (d == SideE || d == SideW) {
    if (gy == m) recross(s, sq, gx, gy, SideN, m);
    if (d == SideE && gx == m) recross(s, sq, gx, gy, SideE, m);
    if (d == SideW && gx == 0) recross(s, sq, gx, gy, SideW, m);
  } else {
    if (gx == m) recross(s, sq, gx, gy, SideE, m);
    if (d == SideN && gy == m) recross(s, sq, gx, gy, SideN, m);
    if (d == SideS && gy == 0) recross(s, sq, gx, gy, SideS, m);
  }
  return Step{sq, gx, gy, d};
}

GridWalker::GridWalker(const FlatSurface& s, int mesh, int sq, int gx, int gy)
    : s_(&s), sq_(sq), gx_(gx), gy_(gy) {
  w_.mesh = mesh;
}

void GridWalker::move(Side d) {
  Step st = make_step(*s_, w_.mesh, sq_, gx_, gy_, d);
  w_.steps.push_back(st);
  sq_ = st.sq;
  gx_ = st.gx + DX[int(d)];
  gy_ = st.gy + DY[int(d)];
}

GridWalk GridWalker::take() { return std::move(w_); }

GridWalk subdivide(const GridWalk& w, int k) {
  if (k == 1) return w;
  GridWalk out;
  out.mesh = w.mesh * k;
  out.steps.reserve(w.steps.size() * k);
  for (const Step& st : w.steps) {
    for (int j = 0; j < k; ++j) {
      Step sub = st;
      sub.gx = st.gx * k + j * DX[int(st.dir)];
      sub.gy = st.gy * k + j * DY[int(st.dir)];
      out.steps.push_back(sub);
    }
  }
  return out;
}

GridWalk reversed(const FlatSurface& s, const GridWalk& w) {
  GridWalk out;
  out.mesh = w.mesh;
  for (auto it = w.steps.rbegin(); it != w.steps.rend(); ++it) {
    out.steps.push_back(make_step(s, w.mesh, it->sq, it->gx + DX[int(it->dir)],
                                  it->gy + DY[int(it->dir)], opposite(it->dir)));
  }
  return out;
}

GridWalk concat(const GridWalk& a, const GridWalk& b) {
  if (a.mesh != b.mesh) throw Error("concat: mesh mismatch");
  GridWalk out = a;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  return out;
}

std::vector<int> walk_vertices(const FlatSurface& s, const MeshIndex& mi,
                               const GridWalk& w) {
  (void)s;
  std::vector<int> vs;
  vs.reserve(w.steps.size());
  for (const Step& st : w.steps) vs.push_back(mi.id(st.sq, st.gx, st.gy));
  return vs;
}

bool walk_is_closed(const FlatSurface& s, const GridWalk& w) {
  if (w.steps.empty()) return true;
  MeshIndex mi(s, w.mesh);
  const Step& st = w.steps.back();
  int end = mi.id(st.sq, st.gx + DX[int(st.dir)], st.gy + DY[int(st.dir)]);
  const Step& s0 = w.steps.front();
  return end == mi.id(s0.sq, s0.gx, s0.gy);
}

double winding(const FlatSurface& s, const GridWalk& w) {
  if (w.steps.empty()) return 0.0;
  cplx tau = s.cell_tau();
  const cplx dirv[4] = {cplx(1, 0), tau, cplx(-1, 0), -tau};
  double total = 0.0;
  size_t n = w.steps.size();
  for (size_t i = 0; i < n; ++i) {
    Side d1 = w.steps[i].dir;
    Side d2 = w.steps[(i + 1) % n].dir;
    if (d2 == opposite(d1)) {
      total += (d1 == SideE || d1 == SideN) ? -kPi : kPi;
    } else {
      total += std::arg(dirv[int(d2)] / dirv[int(d1)]);
    }
  }
  return total;
}

std::vector<ChartSeg> offset_segments(const FlatSurface& s, const GridWalk& w) {
  std::vector<ChartSeg> out;
  int m = w.mesh;
  long long top = 4LL * m;
  for (const Step& st : w.steps) {
    long long x0 = 4LL * st.gx + 1, y0 = 4LL * st.gy + 1;
    long long x1 = x0 + 4 * DX[int(st.dir)], y1 = y0 + 4 * DY[int(st.dir)];
    // Split the piece poking past a chart boundary (by at most 1 unit at the
    // start of W/S steps and 1 past at the end of E/N steps).
    auto clamp_emit = [&](int sq, long long a0, long long b0, long long a1,
                          long long b1) {
      out.push_back(ChartSeg{sq, a0, b0, a1, b1});
    };
    if (st.dir == SideE && x1 > top) {
      clamp_emit(st.sq, x0, y0, top, y0);
      SideRef r = s.cross(st.sq, SideE);
      clamp_emit(r.sq, 0, y0, x1 - top, y0);
    } else if (st.dir == SideW && x0 > top) {
      SideRef r = s.cross(st.sq, SideE);
      clamp_emit(r.sq, x0 - top, y0, 0, y0);
      clamp_emit(st.sq, top, y0, x1, y0);
    } else if (st.dir == SideN && y1 > top) {
      clamp_emit(st.sq, x0, y0, x0, top);
      SideRef r = s.cross(st.sq, SideN);
      clamp_emit(r.sq, x0, 0, x0, y1 - top);
    } else if (st.dir == SideS && y0 > top) {
      SideRef r = s.cross(st.sq, SideN);
      clamp_emit(r.sq, x0, y0 - top, x0, 0);
      clamp_emit(st.sq, x0, top, x0, y1);
    } else if (st.dir == SideW && x1 < 0) {
      clamp_emit(st.sq, x0, y0, 0, y0);
      SideRef r = s.cross(st.sq, SideW);
      clamp_emit(r.sq, top, y0, top + x1, y0);
    } else if (st.dir == SideS && y1 < 0) {
      clamp_emit(st.sq, x0, y0, x0, 0);
      SideRef r = s.cross(st.sq, SideS);
      clamp_emit(r.sq, x0, top, x0, top + y1);
    } else {
      clamp_emit(st.sq, x0, y0, x1, y1);
    }
  }
  return out;
}

std::vector<ChartSeg> gridline_segments(const FlatSurface& s, const GridWalk& w) {
  std::vector<ChartSeg> out;
  int m = w.mesh;
  long long top = 4LL * m;
  for (const Step& st : w.steps) {
    long long x0 = 4LL * st.gx, y0 = 4LL * st.gy;
    long long x1 = x0 + 4 * DX[int(st.dir)], y1 = y0 + 4 * DY[int(st.dir)];
    out.push_back(ChartSeg{st.sq, x0, y0, x1, y1});
    // A step running along a gluing side also exists in the neighbour chart.
    if (st.dir == SideE || st.dir == SideW) {
      if (y0 == 0) {
        SideRef r = s.cross(st.sq, SideS);
        out.push_back(ChartSeg{r.sq, x0, top, x1, top});
      }
    } else {
      if (x0 == 0) {
        SideRef r = s.cross(st.sq, SideW);
        out.push_back(ChartSeg{r.sq, top, y0, top, y1});
      }
    }
  }
  return out;
}

namespace {

int seg_dir_sign(const ChartSeg& c) {
  if (c.x1 != c.x0) return c.x1 > c.x0 ? 1 : -1;
  return c.y1 > c.y0 ? 1 : -1;
}
bool seg_horizontal(const ChartSeg& c) { return c.y0 == c.y1; }

// Does coordinate x lie on the directed span [from, to), including the start
// and excluding the end?  Offset pieces are split at chart seams, so crossings
// on a seam must be attributed to exactly one sub-piece: the one starting there.
bool on_halfopen(long long from, long long to, long long x) {
  if (from < to) return x >= from && x < to;
  return x <= from && x > to;
}

// Signed crossing of offset piece o with base grid segment b; the offset span
// is taken half-open in traversal order.  Returns sign(det[d_b, d_o]) or 0.
long long cross_offset_base(const ChartSeg& o, const ChartSeg& b) {
  if (seg_horizontal(o) == seg_horizontal(b)) return 0;
  if (seg_horizontal(o)) {
    // o horizontal at odd y, b vertical at x % 4 == 0
    long long by0 = std::min(b.y0, b.y1), by1 = std::max(b.y0, b.y1);
    if (!(o.y0 > by0 && o.y0 < by1)) return 0;
    if (!on_halfopen(o.x0, o.x1, b.x0)) return 0;
    // det[d_b, d_o] = -dy_b * dx_o... det[(0,dy),(dx,0)] = -dy*dx
    return -seg_dir_sign(b) * seg_dir_sign(o);
  }
  long long bx0 = std::min(b.x0, b.x1), bx1 = std::max(b.x0, b.x1);
  if (!(o.x0 > bx0 && o.x0 < bx1)) return 0;
  if (!on_halfopen(o.y0, o.y1, b.y0)) return 0;
  // det[(dx,0),(0,dy)] = dx*dy
  return seg_dir_sign(b) * seg_dir_sign(o);
}

}  // namespace

long long intersection_number(const FlatSurface& s, const GridWalk& c1,
                              const GridWalk& c2) {
  if (c1.mesh != c2.mesh) throw Error("intersection_number: mesh mismatch");
  auto base = gridline_segments(s, c1);
  auto off = offset_segments(s, c2);
  std::map<int, std::vector<const ChartSeg*>> by_chart;
  for (const auto& seg : base) by_chart[seg.sq].push_back(&seg);
  long long total = 0;
  for (const auto& o : off) {
    auto it = by_chart.find(o.sq);
    if (it == by_chart.end()) continue;
    for (const ChartSeg* b : it->second) total += cross_offset_base(o, *b);
  }
  return total;
}

long long crossings_with_walk(const FlatSurface& s, const GridWalk& walk,
                              const std::vector<ChartSeg>& transversal) {
  // Transversal segments have odd-even coordinates (never on grid lines);
  // crossings with gluing-side steps are disambiguated by the half-open rule
  // [min, max) on the transversal's span.
  auto base = gridline_segments(s, walk);
  std::map<int, std::vector<const ChartSeg*>> by_chart;
  for (const auto& seg : base) by_chart[seg.sq].push_back(&seg);
  long long total = 0;
  for (const auto& t : transversal) {
    auto it = by_chart.find(t.sq);
    if (it == by_chart.end()) continue;
    for (const ChartSeg* b : it->second) {
      bool th = seg_horizontal(t), bh = seg_horizontal(*b);
      if (th == bh) continue;
      if (bh) {
        // walk horizontal at y=b.y0, transversal vertical
        long long bx0 = std::min(b->x0, b->x1), bx1 = std::max(b->x0, b->x1);
        long long ty0 = std::min(t.y0, t.y1), ty1 = std::max(t.y0, t.y1);
        if (t.x0 > bx0 && t.x0 < bx1 && b->y0 >= ty0 && b->y0 < ty1) {
          // det[(0,dy),(dx,0)] = -dy*dx
          total += -seg_dir_sign(t) * seg_dir_sign(*b);
        }
      } else {
        long long by0 = std::min(b->y0, b->y1), by1 = std::max(b->y0, b->y1);
        long long tx0 = std::min(t.x0, t.x1), tx1 = std::max(t.x0, t.x1);
        if (t.y0 > by0 && t.y0 < by1 && b->x0 >= tx0 && b->x0 < tx1) {
          total += seg_dir_sign(t) * seg_dir_sign(*b);  // det[(dx,0),(0,dy)]
        }
      }
    }
  }
  return total;
}

GridWalk avoid_cones(const FlatSurface& s, const GridWalk& w) {
  if (w.steps.empty()) return w;
  int m = w.mesh;
  if (m < 2) throw Error("avoid_cones requires mesh >= 2");
  MeshIndex mi(s, m);
  auto vs = walk_vertices(s, mi, w);
  size_t n = w.steps.size();
  // rotate so the walk starts at a non-cone vertex
  size_t start = 0;
  while (start < n && mi.is_cone(vs[start])) ++start;
  if (start == n) throw Error("avoid_cones: walk entirely on cone vertices");
  std::vector<Step> steps;
  steps.reserve(n + 16);
  for (size_t i = 0; i < n; ++i) steps.push_back(w.steps[(start + i) % n]);

  // cw boundary ray direction of the quarter with the vertex at corner c
  auto cw_ray = [](int c) {
    switch (c) {
      case CSW: return SideE;
      case CSE: return SideN;
      case CNE: return SideW;
      case CNW: return SideS;
    }
    return SideE;
  };
  auto ccw_ray = [](int c) {
    switch (c) {
      case CSW: return SideN;
      case CSE: return SideW;
      case CNE: return SideS;
      case CNW: return SideE;
    }
    return SideN;
  };

  // Quarter link traversals with explicit witnesses (valid for mesh >= 2).
  // CCW: from the cw-ray neighbour over the quarter diagonal to the ccw-ray
  // neighbour; CW is the reverse.
  auto quarter_steps = [&](int p, int c, bool ccw) {
    std::array<Step, 2> st;
    switch (c) {
      case CSW:
        st = ccw ? std::array<Step, 2>{Step{p, 1, 0, SideN}, Step{p, 1, 1, SideW}}
                 : std::array<Step, 2>{Step{p, 0, 1, SideE}, Step{p, 1, 1, SideS}};
        break;
      case CSE:
        st = ccw ? std::array<Step, 2>{Step{p, m, 1, SideW}, Step{p, m - 1, 1, SideS}}
                 : std::array<Step, 2>{Step{p, m - 1, 0, SideN}, Step{p, m - 1, 1, SideE}};
        break;
      case CNE:
        st = ccw ? std::array<Step, 2>{Step{p, m - 1, m, SideS}, Step{p, m - 1, m - 1, SideE}}
                 : std::array<Step, 2>{Step{p, m, m - 1, SideW}, Step{p, m - 1, m - 1, SideN}};
        break;
      default:
        st = ccw ? std::array<Step, 2>{Step{p, 0, m - 1, SideE}, Step{p, 1, m - 1, SideN}}
                 : std::array<Step, 2>{Step{p, 1, m, SideS}, Step{p, 1, m - 1, SideW}};
        break;
    }
    // re-normalize (the W/S witnesses above may sit on chart boundaries)
    for (Step& x : st) x = make_step(s, m, x.sq, x.gx, x.gy, x.dir);
    return st;
  };

  std::vector<Step> result;
  size_t i = 0;
  while (i < steps.size()) {
    const Step& st = steps[i];
    int esq = st.sq, ex = st.gx + DX[int(st.dir)], ey = st.gy + DY[int(st.dir)];
    int vid = mi.id(esq, ex, ey);
    if (!mi.is_cone(vid) || i + 1 >= steps.size()) {
      result.push_back(st);
      ++i;
      continue;
    }
    // Replace [step into v][step out of v] by the link path between the two
    // neighbour vertices of the cone v.
    const Step& out = steps[i + 1];
    if ((ex % m) || (ey % m)) {
      if (!((ex == 0 || ex == m) && (ey == 0 || ey == m)))
        throw Error("internal: cone not at a corner");
    }
    Side din_back = opposite(st.dir);
    int corner_in = (ex == m ? (ey == m ? CNE : CSE) : (ey == m ? CNW : CSW));
    int vclass = s.corner_class(esq, corner_in);
    const auto& fan = s.fan(vclass);
    int K = int(fan.size());
    auto ray_index = [&](int sq, Side dir) {
      for (int k = 0; k < K; ++k)
        if (fan[k].first == sq && cw_ray(fan[k].second) == dir) return k;
      for (int k = 0; k < K; ++k)
        if (fan[k].first == sq && ccw_ray(fan[k].second) == dir)
          return (k + 1) % K;
      throw Error("internal: ray not found in fan");
    };
    int ri = ray_index(esq, din_back);
    int ro = ray_index(out.sq, out.dir);
    int ccw_hops = imod(ro - ri, K);
    int cw_hops = imod(ri - ro, K);
    bool go_ccw = ccw_hops <= cw_hops;
    int hops = go_ccw ? ccw_hops : cw_hops;
    for (int h = 0; h < hops; ++h) {
      int q = go_ccw ? imod(ri + h, K) : imod(ri - 1 - h, K);
      auto qs = quarter_steps(fan[q].first, fan[q].second, go_ccw);
      result.push_back(qs[0]);
      result.push_back(qs[1]);
    }
    i += 2;
  }
  GridWalk outw;
  outw.mesh = m;
  outw.steps = std::move(result);
  if (!walk_is_closed(s, outw)) throw Error("internal: avoid_cones broke closure");
  // the detours may have created new passes; also verify no cone remains
  MeshIndex mi2(s, m);
  for (int v : walk_vertices(s, mi2, outw))
    if (mi2.is_cone(v)) throw Error("internal: cone visit survived avoid_cones");
  return outw;
}

namespace {

void cancel_backtracks(std::vector<Step>& steps) {
  bool changed = true;
  while (changed && steps.size() >= 2) {
    changed = false;
    std::vector<Step> next;
    next.reserve(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) {
      if (!next.empty() && steps[i].dir == opposite(next.back().dir)) {
        next.pop_back();
        changed = true;
      } else {
        next.push_back(steps[i]);
      }
    }
    // cyclic cancellation at the seam
    while (next.size() >= 2 && next.front().dir == opposite(next.back().dir)) {
      next.erase(next.begin());
      next.pop_back();
      changed = true;
    }
    steps = std::move(next);
  }
}

}  // namespace

std::vector<GridWalk> simple_decomposition(const FlatSurface& s,
                                           const GridWalk& w) {
  std::vector<GridWalk> out;
  std::vector<std::vector<Step>> queue;
  queue.push_back(w.steps);
  MeshIndex mi(s, w.mesh);
  while (!queue.empty()) {
    std::vector<Step> steps = std::move(queue.back());
    queue.pop_back();
    cancel_backtracks(steps);
    if (steps.empty()) continue;
    // find a repeated start-vertex; if none, it is vertex-simple
    std::map<int, size_t> seen;
    bool split = false;
    std::vector<int> vids(steps.size());
    for (size_t i = 0; i < steps.size(); ++i)
      vids[i] = mi.id(steps[i].sq, steps[i].gx, steps[i].gy);
    for (size_t i = 0; i < steps.size(); ++i) {
      auto it = seen.find(vids[i]);
      if (it != seen.end()) {
        std::vector<Step> loop(steps.begin() + it->second, steps.begin() + i);
        std::vector<Step> rest(steps.begin(), steps.begin() + it->second);
        rest.insert(rest.end(), steps.begin() + i, steps.end());
        queue.push_back(std::move(loop));
        queue.push_back(std::move(rest));
        split = true;
        break;
      }
      seen[vids[i]] = i;
    }
    if (!split) {
      GridWalk piece;
      piece.mesh = w.mesh;
      piece.steps = std::move(steps);
      out.push_back(std::move(piece));
    }
  }
  return out;
}

long long cut_crossings(const FlatSurface& s, const CutSystem& cuts,
                        const GridWalk& c) {
  long long total = 0;
  for (const auto& cut : cuts.cuts) {
    GridWalk g = cut;
    if (g.mesh != c.mesh) {
      if (c.mesh % g.mesh) throw Error("cut_crossings: incompatible meshes");
      g = subdivide(g, c.mesh / g.mesh);
    }
    total += intersection_number(s, g, c);
  }
  return total;
}

int q0_of_walk(const FlatSurface& s, const CutSystem& cuts, const GridWalk& c) {
  auto pieces = simple_decomposition(s, c);
  long long q = 0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    double wd = winding(s, pieces[i]);
    long long k = std::llround(wd / (2 * kPi));
    if (std::abs(wd - 2 * kPi * double(k)) > 1e-9)
      throw Error("q0: non-integer winding on a simple piece");
    q += k + cut_crossings(s, cuts, pieces[i]) + 1;
    for (size_t j = i + 1; j < pieces.size(); ++j)
      q += intersection_number(s, pieces[i], pieces[j]);
  }
  return int(imod(q, 2));
}

}  // namespace flatdimers

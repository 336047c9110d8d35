#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "flatdimers/surface.hpp"

namespace flatdimers {

namespace {

struct SkelEdge {
  int sq;
  Side side;   // canonical side representative of the glued pair
  int u, v;    // corner classes: param-0 -> param-1 endpoint
};

// Step realizing the CCW (dirn>0) or reversed traversal of a side at mesh 1.
Step side_step(const FlatSurface& s, Side side, int sq, int dirn) {
  int x0 = 0, y0 = 0;
  Side d = SideE;
  switch (side) {
    case SideE: x0 = 1; y0 = 0; d = SideN; break;
    case SideN: x0 = 1; y0 = 1; d = SideW; break;
    case SideW: x0 = 0; y0 = 1; d = SideS; break;
    case SideS: x0 = 0; y0 = 0; d = SideE; break;
  }
  if (dirn > 0) return make_step(s, 1, sq, x0, y0, d);
  constexpr int DX[4] = {1, 0, -1, 0};
  constexpr int DY[4] = {0, 1, 0, -1};
  return make_step(s, 1, sq, x0 + DX[int(d)], y0 + DY[int(d)], opposite(d));
}

Corner p0_corner(Side s) {
  switch (s) {
    case SideE: return CSE;
    case SideN: return CNE;
    case SideW: return CNW;
    case SideS: return CSW;
  }
  return CSE;
}
Corner p1_corner(Side s) {
  switch (s) {
    case SideE: return CNE;
    case SideN: return CNW;
    case SideW: return CSW;
    case SideS: return CSE;
  }
  return CNE;
}

std::vector<SkelEdge> skeleton_edges(const FlatSurface& s) {
  std::vector<SkelEdge> edges;
  std::set<std::pair<int, int>> done;
  for (int p = 0; p < s.squares(); ++p)
    for (int sd = 0; sd < 4; ++sd) {
      if (done.count({p, sd})) continue;
      SideRef r = s.cross(p, Side(sd));
      done.insert({p, sd});
      done.insert({r.sq, int(r.side)});
      SkelEdge e;
      e.sq = p;
      e.side = Side(sd);
      e.u = s.corner_class(p, p0_corner(Side(sd)));
      e.v = s.corner_class(p, p1_corner(Side(sd)));
      edges.push_back(e);
    }
  return edges;
}

// Integer antisymmetric Gram matrix -> symplectic pairs via congruence ops.
// Returns index pairs (i, j) with M[i][j] = 1 after transforming the
// generator coefficient rows in `gen`.
std::vector<std::pair<int, int>> symplectic_reduce(
    std::vector<std::vector<long long>>& m,
    std::vector<std::vector<long long>>& gen) {
  int r = int(m.size());
  std::vector<char> active(r, 1);
  std::vector<std::pair<int, int>> pairs;
  auto add_row = [&](int dst, int src, long long c) {
    // gen_dst += c * gen_src;  M updates by congruence
    for (auto& x : gen[dst]) (void)x;
    for (size_t k = 0; k < gen[dst].size(); ++k) gen[dst][k] += c * gen[src][k];
    for (int k = 0; k < r; ++k) m[dst][k] += c * m[src][k];
    for (int k = 0; k < r; ++k) m[k][dst] += c * m[k][src];
  };
  for (;;) {
    int bi = -1, bj = -1;
    long long best = 0;
    for (int i = 0; i < r; ++i) {
      if (!active[i]) continue;
      for (int j = 0; j < r; ++j) {
        if (!active[j] || m[i][j] == 0) continue;
        if (bi < 0 || std::llabs(m[i][j]) < std::llabs(best)) {
          bi = i;
          bj = j;
          best = m[i][j];
        }
      }
    }
    if (bi < 0) break;
    if (best < 0) std::swap(bi, bj);
    long long d = m[bi][bj];
    // try to reduce some non-divisible entry; restart if found
    bool reduced = false;
    for (int k = 0; k < r && !reduced; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      if (m[bi][k] % d != 0) {
        add_row(k, bj, -(m[bi][k] / d));
        reduced = true;
      } else if (m[bj][k] % d != 0) {
        add_row(k, bi, m[bj][k] / d);
        reduced = true;
      }
    }
    if (reduced) continue;
    // clear the rest of rows bi and bj
    for (int k = 0; k < r; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      if (m[bi][k] != 0) add_row(k, bj, -(m[bi][k] / d));
      if (m[bj][k] != 0) add_row(k, bi, m[bj][k] / d);
    }
    if (d != 1) throw Error("symplectic reduction: non-unimodular pivot");
    pairs.emplace_back(bi, bj);
    active[bi] = active[bj] = 0;
  }
  return pairs;
}

}  // namespace

HomologyBasis homology_basis(const FlatSurface& s) {
  if (!s.holonomy_trivial()) throw Error("homology basis requires trivial holonomy");
  int g = s.genus();
  if (g < 1) throw Error("no basis: surface has genus 0");
  MeshIndex mi(s, 1);
  auto edges = skeleton_edges(s);
  int nv = mi.count();
  if (nv != s.num_corner_classes()) throw Error("internal: class mismatch");

  // spanning tree by BFS from a non-cone root so that cone detours keep all
  // fundamental cycles based at the same vertex
  int root = -1;
  for (int v = 0; v < nv && root < 0; ++v)
    if (!mi.is_cone(v)) root = v;
  if (root < 0) throw Error("homology basis: every vertex is a cone");
  std::vector<int> parent(nv, -2);
  std::vector<int> parent_edge(nv, -1), parent_dirn(nv, 0);
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (edge, +1/-1)
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].u].push_back({int(e), +1});
    adj[edges[e].v].push_back({int(e), -1});
  }
  std::queue<int> q;
  parent[root] = -1;
  q.push(root);
  std::vector<char> tree_edge(edges.size(), 0);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [e, dirn] : adj[u]) {
      int v = dirn > 0 ? edges[e].v : edges[e].u;
      if (parent[v] != -2) continue;
      parent[v] = u;
      parent_edge[v] = e;
      parent_dirn[v] = dirn;
      tree_edge[e] = 1;
      q.push(v);
    }
  }

  // path root -> v as (edge, dirn) list
  auto path_from_root = [&](int v) {
    std::vector<std::pair<int, int>> p;
    while (parent[v] >= 0) {
      p.push_back({parent_edge[v], parent_dirn[v]});
      v = parent[v];
    }
    std::reverse(p.begin(), p.end());
    return p;
  };

  std::vector<GridWalk> fundamental;
  for (size_t e = 0; e < edges.size(); ++e) {
    if (tree_edge[e]) continue;
    GridWalk f;
    f.mesh = 1;
    auto emit = [&](int ed, int dirn) {
      f.steps.push_back(side_step(s, edges[ed].side, edges[ed].sq, dirn));
    };
    for (auto [pe, pd] : path_from_root(edges[e].u)) emit(pe, pd);
    emit(int(e), +1);
    auto pth = path_from_root(edges[e].v);
    std::reverse(pth.begin(), pth.end());
    for (auto [pe, pd] : pth) emit(pe, -pd);
    if (!walk_is_closed(s, f)) throw Error("internal: fundamental cycle not closed");
    // reroute around cones before any crossing count: the offset convention
    // is single-valued only at regular vertices
    fundamental.push_back(avoid_cones(s, subdivide(f, 2)));
  }

  int r = int(fundamental.size());
  std::vector<std::vector<long long>> gram(r, std::vector<long long>(r, 0));
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      long long x = intersection_number(s, fundamental[i], fundamental[j]);
      gram[i][j] = x;
      gram[j][i] = -x;
    }
  std::vector<std::vector<long long>> gen(r, std::vector<long long>(r, 0));
  for (int i = 0; i < r; ++i) gen[i][i] = 1;
  auto pairs = symplectic_reduce(gram, gen);
  if (int(pairs.size()) != g) throw Error("symplectic rank mismatch");

  auto realize = [&](const std::vector<long long>& coeff) {
    GridWalk acc;
    acc.mesh = 2;
    for (int k = 0; k < r; ++k) {
      long long c = coeff[k];
      if (c == 0) continue;
      GridWalk part = c > 0 ? fundamental[k] : reversed(s, fundamental[k]);
      for (long long t = 0; t < std::llabs(c); ++t) acc = concat(acc, part);
    }
    return avoid_cones(s, acc);
  };

  HomologyBasis basis;
  basis.g = g;
  basis.cycles.resize(2 * g);
  for (int i = 0; i < g; ++i) {
    basis.cycles[i] = realize(gen[pairs[i].first]);
    basis.cycles[g + i] = realize(gen[pairs[i].second]);
  }
  basis.intersection.assign(2 * g, std::vector<long long>(2 * g, 0));
  for (int i = 0; i < 2 * g; ++i)
    for (int j = 0; j < 2 * g; ++j) {
      if (i == j) continue;
      basis.intersection[i][j] =
          intersection_number(s, basis.cycles[i], basis.cycles[j]);
    }
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      long long ab = basis.intersection[i][g + j];
      long long aa = basis.intersection[i][j];
      long long bb = basis.intersection[g + i][g + j];
      if (ab != (i == j ? 1 : 0) || aa != 0 || bb != 0)
        throw Error("homology basis failed the symplectic check");
    }
  return basis;
}

CutSystem cut_system(const FlatSurface& s) {
  CutSystem cs;
  std::vector<int> cone_vids;
  MeshIndex mi(s, 1);
  for (int v = 0; v < mi.count(); ++v)
    if (mi.is_cone(v)) cone_vids.push_back(v);
  if (cone_vids.empty()) return cs;
  if (cone_vids.size() % 2) throw Error("cut system: odd number of cones");

  auto edges = skeleton_edges(s);
  int nv = mi.count();
  std::vector<std::vector<std::pair<int, int>>> adj(nv);
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].u].push_back({int(e), +1});
    adj[edges[e].v].push_back({int(e), -1});
  }

  std::vector<int> order(cone_vids.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end());
  do {
    std::vector<char> used(nv, 0);
    for (int vc : cone_vids) used[vc] = 1;  // interiors avoid all cones
    std::vector<GridWalk> paths;
    bool ok = true;
    for (size_t k = 0; k + 1 < order.size() && ok; k += 2) {
      int a = cone_vids[order[k]], b = cone_vids[order[k + 1]];
      // BFS from a to b over skeleton edges avoiding used interior vertices
      std::vector<int> pe(nv, -1), pd(nv, 0), pv(nv, -2);
      std::queue<int> q;
      q.push(a);
      pv[a] = -1;
      bool found = false;
      while (!q.empty() && !found) {
        int u = q.front();
        q.pop();
        for (auto [e, dirn] : adj[u]) {
          int v = dirn > 0 ? edges[e].v : edges[e].u;
          if (pv[v] != -2) continue;
          if (v != b && used[v]) continue;
          pv[v] = u;
          pe[v] = e;
          pd[v] = dirn;
          if (v == b) {
            found = true;
            break;
          }
          q.push(v);
        }
      }
      if (!found) {
        ok = false;
        break;
      }
      std::vector<std::pair<int, int>> chain;
      for (int v = b; pv[v] >= 0; v = pv[v]) chain.push_back({pe[v], pd[v]});
      std::reverse(chain.begin(), chain.end());
      GridWalk path;
      path.mesh = 1;
      std::vector<int> interior;
      int cur = a;
      for (auto [e, dirn] : chain) {
        path.steps.push_back(side_step(s, edges[e].side, edges[e].sq, dirn));
        cur = dirn > 0 ? edges[e].v : edges[e].u;
        if (cur != b) interior.push_back(cur);
      }
      for (int v : interior) used[v] = 1;
      paths.push_back(std::move(path));
    }
    if (ok) {
      cs.cuts = std::move(paths);
      return cs;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  throw Error("cut system: no disjoint pairing found");
}

}  // namespace flatdimers

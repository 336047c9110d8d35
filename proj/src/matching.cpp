#include <algorithm>

#include "flatdimers/graph.hpp"

namespace flatdimers {

namespace {

struct Enumerator {
  const DimerGraph& g;
  size_t cap;
  const std::function<void(const DimerCover&)>& cb;
  std::vector<int> white_index;  // vertex id -> white order, -1 for black
  std::vector<char> used;        // by vertex id
  std::vector<int> cover;        // edge per white order
  size_t count = 0;
  bool truncated = false;

  bool rec(int matched) {
    if (truncated) return false;
    if (matched == int(g.whites.size())) {
      DimerCover d;
      d.edge_of_white = cover;
      cb(d);
      if (++count >= cap) truncated = true;
      return !truncated;
    }
    // pick the unmatched white with fewest available edges (forced first)
    int best = -1, best_deg = 1 << 30;
    for (int w : g.whites) {
      if (used[w]) continue;
      int deg = 0;
      for (int e : g.vedges[w])
        if (!used[g.edges[e].b]) ++deg;
      if (deg < best_deg) {
        best_deg = deg;
        best = w;
        if (deg <= 1) break;
      }
    }
    if (best_deg == 0) return true;  // dead branch
    used[best] = 1;
    for (int e : g.vedges[best]) {
      int b = g.edges[e].b;
      if (used[b]) continue;
      used[b] = 1;
      cover[white_index[best]] = e;
      if (!rec(matched + 1)) {
        used[b] = 0;
        used[best] = 0;
        return false;
      }
      used[b] = 0;
    }
    used[best] = 0;
    return true;
  }
};

}  // namespace

bool enumerate_matchings(const DimerGraph& g, size_t cap,
                         const std::function<void(const DimerCover&)>& cb) {
  Enumerator en{g, cap, cb, {}, {}, {}, 0, false};
  en.white_index.assign(g.verts.size(), -1);
  for (size_t i = 0; i < g.whites.size(); ++i) en.white_index[g.whites[i]] = int(i);
  en.used.assign(g.verts.size(), 0);
  en.cover.assign(g.whites.size(), -1);
  if (g.whites.size() != g.blacks.size()) return true;  // no matchings
  en.rec(0);
  return !en.truncated;
}

double matching_count_permanent(const DimerGraph& g) {
  int n = int(g.whites.size());
  if (n != int(g.blacks.size())) return 0.0;
  if (n > 30) throw Error("permanent: too large");
  std::vector<int> bindex(g.verts.size(), -1);
  for (int i = 0; i < n; ++i) bindex[g.blacks[i]] = i;
  // multiplicity matrix row per white
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges) {
    int wi = -1;
    for (int i = 0; i < n; ++i)
      if (g.whites[i] == e.w) wi = i;
    a[wi][bindex[e.b]] += 1.0;
  }
  // Ryser with Gray code: perm = sum_S (-1)^{n-|S|} prod_i rowsum_i(S)
  double total = 0.0;
  std::vector<double> rowsum(n, 0.0);
  uint64_t full = (1ULL << n) - 1;
  uint64_t gray_prev = 0;
  for (uint64_t k = 1; k <= full; ++k) {
    uint64_t gray = k ^ (k >> 1);
    uint64_t diff = gray ^ gray_prev;
    int j = 0;
    while (!((diff >> j) & 1)) ++j;
    double dir = (gray >> j) & 1 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += dir * a[i][j];
    gray_prev = gray;
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    int bits = __builtin_popcountll(gray);
    total += ((n - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

DimerCover first_matching(const DimerGraph& g) {
  int n = int(g.whites.size());
  std::vector<int> match_b(g.verts.size(), -1);  // black vertex -> edge id
  std::vector<int> match_w(n, -1);               // white order -> edge id
  std::vector<int> windex(g.verts.size(), -1);
  for (int i = 0; i < n; ++i) windex[g.whites[i]] = i;
  std::vector<char> visited(g.verts.size(), 0);
  std::function<bool(int)> augment = [&](int w) -> bool {
    for (int e : g.vedges[w]) {
      int b = g.edges[e].b;
      if (visited[b]) continue;
      visited[b] = 1;
      if (match_b[b] < 0 || augment(g.edges[match_b[b]].w)) {
        match_b[b] = e;
        match_w[windex[w]] = e;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!augment(g.whites[i])) throw Error("graph admits no perfect matching");
  }
  DimerCover d;
  d.edge_of_white = match_w;
  return d;
}

}  // namespace flatdimers

#include "flatdimers/surface.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace flatdimers {

Side side_from_char(char c) {
  switch (c) {
    case 'E': return SideE;
    case 'N': return SideN;
    case 'W': return SideW;
    case 'S': return SideS;
  }
  throw Error(std::string("bad side label '") + c + "'");
}

char side_to_char(Side s) { return "ENWS"[int(s)]; }

namespace {

// Direction rotation picked up when crossing from side s into side s'.
int gluing_rotation(Side s, Side s2) { return imod(int(s2) + 2 - int(s), 4); }

// CCW traversal of a side: param-0 corner and param-1 corner.
Corner param0_corner(Side s) {
  switch (s) {
    case SideE: return CSE;
    case SideN: return CNE;
    case SideW: return CNW;
    case SideS: return CSW;
  }
  return CSW;
}
Corner param1_corner(Side s) {
  switch (s) {
    case SideE: return CNE;
    case SideN: return CNW;
    case SideW: return CSW;
    case SideS: return CSE;
  }
  return CSW;
}

// Side crossed when rotating CCW around the corner, staying in the square.
Side ccw_exit_side(int corner) {
  switch (corner) {
    case CSW: return SideW;
    case CSE: return SideS;
    case CNE: return SideE;
    case CNW: return SideN;
  }
  return SideW;
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

FlatSurface FlatSurface::parse(const std::string& text) {
  FlatSurface s;
  std::map<long long, int> idmap;
  std::vector<std::array<SideRef, 4>> glue;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto parse_sideref = [&](const std::string& tok) -> SideRef {
    auto dot = tok.find('.');
    if (dot == std::string::npos || dot + 2 != tok.size())
      throw Error("bad side reference '" + tok + "'");
    long long id = std::stoll(tok.substr(0, dot));
    auto it = idmap.find(id);
    if (it == idmap.end()) throw Error("glue references unknown square " + tok);
    return SideRef{it->second, side_from_char(tok[dot + 1])};
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "square") {
      long long id;
      if (!(ls >> id)) throw Error("square: missing id");
      if (!idmap.emplace(id, int(idmap.size())).second)
        throw Error("duplicate square " + std::to_string(id));
      glue.push_back({SideRef{}, SideRef{}, SideRef{}, SideRef{}});
    } else if (kw == "glue") {
      std::string a, b;
      if (!(ls >> a >> b)) throw Error("glue: expected two side references");
      SideRef ra = parse_sideref(a), rb = parse_sideref(b);
      if (ra.sq == rb.sq && ra.side == rb.side)
        throw Error("gluing a side to itself: " + a);
      if (glue[ra.sq][ra.side].sq >= 0 || glue[rb.sq][rb.side].sq >= 0)
        throw Error("side glued twice (non-involutive gluing) near '" + a + " " + b + "'");
      glue[ra.sq][ra.side] = rb;
      glue[rb.sq][rb.side] = ra;
    } else if (kw == "cell") {
      double re, im;
      if (!(ls >> re >> im)) throw Error("cell: expected two reals");
      if (im <= 0) throw Error("cell modulus must have positive imaginary part");
      s.tau_ = cplx(re, im);
    } else {
      throw Error("unknown keyword '" + kw + "' on line " + std::to_string(lineno));
    }
  }
  s.nsq_ = int(glue.size());
  if (s.nsq_ == 0) throw Error("no squares declared");
  for (int p = 0; p < s.nsq_; ++p)
    for (int q = 0; q < 4; ++q)
      if (glue[p][q].sq < 0)
        throw Error("unglued side " + std::to_string(p) + "." +
                    side_to_char(Side(q)));
  s.glue_raw_ = glue;
  s.finish();
  return s;
}

void FlatSurface::finish() {
  int n = nsq_;
  // Connectivity over the square adjacency.
  {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
      int p = q.front();
      q.pop();
      for (int sd = 0; sd < 4; ++sd) {
        int r = glue_raw_[p][sd].sq;
        if (!seen[r]) {
          seen[r] = 1;
          ++cnt;
          q.push(r);
        }
      }
    }
    if (cnt != n) throw Error("surface is disconnected");
  }
  // Holonomy: find chart rotations making every gluing opposite-label.
  std::vector<int> rot(n, -1);
  rot[0] = 0;
  holonomy_trivial_ = true;
  {
    std::queue<int> q;
    q.push(0);
    while (!q.empty() && holonomy_trivial_) {
      int p = q.front();
      q.pop();
      for (int sd = 0; sd < 4; ++sd) {
        SideRef r = glue_raw_[p][sd];
        int rho = gluing_rotation(Side(sd), r.side);
        int want = imod(rot[p] - rho, 4);
        if (rot[r.sq] < 0) {
          rot[r.sq] = want;
          q.push(r.sq);
        } else if (rot[r.sq] != want) {
          holonomy_trivial_ = false;
        }
      }
    }
  }
  if (holonomy_trivial_) {
    glue_.assign(n, {SideRef{}, SideRef{}, SideRef{}, SideRef{}});
    for (int p = 0; p < n; ++p)
      for (int sd = 0; sd < 4; ++sd) {
        SideRef r = glue_raw_[p][sd];
        Side from = Side(imod(sd + rot[p], 4));
        Side to = Side(imod(int(r.side) + rot[r.sq], 4));
        glue_[p][from] = SideRef{r.sq, to};
        if (to != opposite(from)) throw Error("internal: normalization failed");
      }
  } else {
    glue_ = glue_raw_;  // geometry ops must not be used
  }
  // Corner classes and fans from the (possibly normalized) gluing.
  const auto& gl = holonomy_trivial_ ? glue_ : glue_raw_;
  vclass_.assign(4 * n, -1);
  fans_.clear();
  n_vclass_ = 0;
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < 4; ++c) {
      if (vclass_[4 * p + c] >= 0) continue;
      std::vector<std::pair<int, int>> fan;
      int cp = p, cc = c;
      do {
        fan.emplace_back(cp, cc);
        vclass_[4 * cp + cc] = n_vclass_;
        Side sd = ccw_exit_side(cc);
        SideRef r = gl[cp][sd];
        cp = r.sq;
        cc = param0_corner(r.side);
      } while (!(cp == p && cc == c));
      fans_.push_back(std::move(fan));
      ++n_vclass_;
    }
  cone_of_class_.assign(n_vclass_, 0);
  cones_.clear();
  for (int v = 0; v < n_vclass_; ++v) {
    int corners = int(fans_[v].size());
    if (corners != 4) {
      cone_of_class_[v] = 1;
      cones_.push_back(Cone{v, corners});
    }
  }
  chi_ = n_vclass_ - 2 * n + n;
  if (holonomy_trivial_ && chi_ % 2 != 0)
    throw Error("internal: odd Euler characteristic");
}

bool FlatSurface::all_cones_4pi() const {
  for (const auto& c : cones_)
    if (c.corners != 8) return false;
  return true;
}

std::string FlatSurface::info_json() const {
  std::ostringstream o;
  o << "{\"squares\":" << nsq_ << ",\"euler_characteristic\":" << chi_
    << ",\"genus\":" << (chi_ % 2 == 0 ? genus() : -1)
    << ",\"holonomy_trivial\":" << (holonomy_trivial_ ? "true" : "false")
    << ",\"all_cones_4pi\":" << (all_cones_4pi() ? "true" : "false")
    << ",\"cones\":[";
  for (size_t i = 0; i < cones_.size(); ++i) {
    if (i) o << ",";
    o << "{\"vertex_class\":" << cones_[i].vclass
      << ",\"angle_over_half_pi\":" << cones_[i].corners << "}";
  }
  o << "]}";
  return o.str();
}

FlatSurface make_single_cell_torus(cplx tau) {
  FlatSurface s = FlatSurface::parse(unit_torus_spec());
  s.tau_ = tau;
  return s;
}

std::string unit_torus_spec() {
  return "square 0\n"
         "glue 0.E 0.W\n"
         "glue 0.N 0.S\n";
}

std::string pillow_g2_spec() {
  // Two rows of four squares; rows wrap horizontally, columns go up by the
  // identity and return from the top by the permutation (1 3).  Genus 2 with
  // two 4*pi cones.
  return "square 0\nsquare 1\nsquare 2\nsquare 3\n"
         "square 4\nsquare 5\nsquare 6\nsquare 7\n"
         "glue 0.E 1.W\nglue 1.E 2.W\nglue 2.E 3.W\nglue 3.E 0.W\n"
         "glue 4.E 5.W\nglue 5.E 6.W\nglue 6.E 7.W\nglue 7.E 4.W\n"
         "glue 0.N 4.S\nglue 1.N 5.S\nglue 2.N 6.S\nglue 3.N 7.S\n"
         "glue 4.N 0.S\nglue 5.N 3.S\nglue 6.N 2.S\nglue 7.N 1.S\n";
}

std::string genus3_4cone_spec() {
  // Quaternion origami: squares indexed by Q8 = {1,-1,i,-i,j,-j,k,-k} as
  // 0..7, east neighbour g*i, north neighbour g*j.  Genus 3, four 4*pi cones.
  // Index: 0:1 1:-1 2:i 3:-i 4:j 5:-j 6:k 7:-k
  static const int mul_i[8] = {2, 3, 1, 0, 7, 6, 4, 5};  // g*i
  static const int mul_j[8] = {4, 5, 6, 7, 1, 0, 3, 2};  // g*j
  std::ostringstream o;
  for (int g = 0; g < 8; ++g) o << "square " << g << "\n";
  for (int g = 0; g < 8; ++g)
    o << "glue " << g << ".E " << mul_i[g] << ".W\n";
  for (int g = 0; g < 8; ++g)
    o << "glue " << g << ".N " << mul_j[g] << ".S\n";
  return o.str();
}

// ---------------------------------------------------------------------------

MeshIndex::MeshIndex(const FlatSurface& s, int mesh) : s_(&s), m_(mesh) {
  if (!s.holonomy_trivial())
    throw Error("mesh index requires trivial holonomy");
  int n = s.squares();
  int w = m_ + 1;
  auto raw = [&](int sq, int gx, int gy) { return (sq * w + gy) * w + gx; };
  UnionFind uf(n * w * w);
  for (int p = 0; p < n; ++p) {
    SideRef e = s.cross(p, SideE);
    SideRef nn = s.cross(p, SideN);
    for (int t = 0; t <= m_; ++t) {
      uf.unite(raw(p, m_, t), raw(e.sq, 0, t));
      uf.unite(raw(p, t, m_), raw(nn.sq, t, 0));
    }
  }
  ids_.assign(n * w * w, -1);
  witness_.clear();
  for (int p = 0; p < n; ++p)
    for (int gy = 0; gy <= m_; ++gy)
      for (int gx = 0; gx <= m_; ++gx) {
        int r = uf.find(raw(p, gx, gy));
        if (ids_[r] < 0) {
          ids_[r] = count_++;
          witness_.push_back({p, gx, gy});
        }
        ids_[raw(p, gx, gy)] = ids_[r];
      }
  cone_.assign(count_, 0);
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < 4; ++c) {
      if (!s.is_cone_class(s.corner_class(p, c))) continue;
      int gx = (c == CSE || c == CNE) ? m_ : 0;
      int gy = (c == CNE || c == CNW) ? m_ : 0;
      cone_[ids_[raw(p, gx, gy)]] = 1;
    }
}

int MeshIndex::id(int sq, int gx, int gy) const {
  int w = m_ + 1;
  return ids_[(sq * w + gy) * w + gx];
}

}  // namespace flatdimers

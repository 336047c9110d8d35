#pragma once

#include <functional>
#include <memory>

#include "flatdimers/surface.hpp"

namespace flatdimers {

struct GVert {
  int sq;       // chart
  int cx, cy;   // lattice indices in the chart (family-specific)
  bool white;
  cplx pos;     // position in the chart, cell coordinates mapped by tau
};

struct GEdge {
  int w, b;        // vertex ids
  double weight;   // dual edge length
  cplx kgeom;      // dual edge as a complex vector, white face on the left
  double f_angle;  // angle flow value theta/2pi
  // geometric course w -> b in scaled chart coordinates (the endpoints alone
  // cannot distinguish wrap edges from direct ones on small tori)
  std::vector<ChartSeg> pieces;
  std::vector<long long> cross;  // signed crossings with A_1..A_g,B_1..B_g
  long long cut_cross = 0;       // crossings with the cut system (parity used)
};

struct Face {
  std::vector<int> verts;  // CCW cycle, alternating colors
  std::vector<int> edges;  // edges[i] joins verts[i] and verts[i+1]
  bool cone = false;
};

struct DimerGraph {
  enum class Family { SquarePillow, HexTorus };
  Family family = Family::SquarePillow;
  int param = 1;  // grid parameter n (pillow) or N (hex)
  std::shared_ptr<const FlatSurface> surf;
  int genus = 0;
  std::vector<GVert> verts;
  std::vector<GEdge> edges;
  std::vector<Face> faces;
  std::vector<int> whites, blacks;
  std::vector<std::vector<int>> vedges;  // incident edge ids per vertex
  bool has_crossings = false;
  std::vector<double> fA_flux;  // angle-flow flux through each basis cycle

  int other_end(int e, int v) const {
    return edges[e].w == v ? edges[e].b : edges[e].w;
  }
};

// Square lattice G^n on a square-tiled surface: per unit cell the (2n)^2
// vertices of (1+i)/(4n) + Z^2/(2n), checkerboard colored.
DimerGraph build_pillow_square(std::shared_ptr<const FlatSurface> s, int n);

// Hexagonal lattice dual to the triangular lattice N^{-1}(Z + e^{i pi/3} Z)
// on the corresponding torus.
DimerGraph build_torus_hex(int n_param);

// Canonical homology representatives used with a graph: generic basis for
// pillow surfaces; the two straight side cycles for the single-cell torus.
HomologyBasis graph_basis(const DimerGraph& g);

// Fills per-edge signed crossings with basis cycles and cuts, plus angle-flow
// fluxes through the basis cycles.
void crossing_data(DimerGraph& g, const HomologyBasis& basis,
                   const CutSystem& cuts);

// Perfect matching as edge ids, one per white vertex (indexed by white order).
struct DimerCover {
  std::vector<int> edge_of_white;
  bool valid(const DimerGraph& g) const;
};

// Exhaustive enumeration (recursive inclusion with forced-edge pruning).
// Returns false if the cap was hit (output truncated).
bool enumerate_matchings(const DimerGraph& g, size_t cap,
                         const std::function<void(const DimerCover&)>& cb);

// Number of perfect matchings by Ryser's permanent formula; independent of
// the enumeration path.  |W| <= 30.
double matching_count_permanent(const DimerGraph& g);

// Some perfect matching by augmenting paths; throws if none exists.
DimerCover first_matching(const DimerGraph& g);

}  // namespace flatdimers

#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flatdimers/util.hpp"

namespace flatdimers {

// Sides in CCW angular order of their outward normal: E=0, N=1, W=2, S=3.
enum Side : int { SideE = 0, SideN = 1, SideW = 2, SideS = 3 };
Side side_from_char(char c);
char side_to_char(Side s);
inline Side opposite(Side s) { return Side((s + 2) % 4); }

// Corners in CCW order: SW=0, SE=1, NE=2, NW=3.
enum Corner : int { CSW = 0, CSE = 1, CNE = 2, CNW = 3 };

struct SideRef {
  int sq = -1;
  Side side = SideE;
  bool operator==(const SideRef& o) const { return sq == o.sq && side == o.side; }
};

// A closed surface glued from unit cells along sides.  Gluings identify side
// parameters orientation-compatibly (CCW parameter s on one side matches
// 1-s on the other), so the result is always oriented.  When every cell can
// be rotated to make all gluings opposite-label the holonomy is trivial and
// the surface carries a translation structure; only then do the geometric
// operations below apply.
class FlatSurface {
 public:
  // Line-oriented format: `square <id>`, `glue <id>.<N|E|S|W> <id>.<N|E|S|W>`,
  // optional `cell <re> <im>` (cell modulus tau, default i), `#` comments.
  static FlatSurface parse(const std::string& text);

  int squares() const { return nsq_; }
  cplx cell_tau() const { return tau_; }
  bool holonomy_trivial() const { return holonomy_trivial_; }
  bool all_cones_4pi() const;

  // Normalized gluing (valid when holonomy is trivial): always opposite-label,
  // side parameters preserved as translations.
  SideRef cross(int sq, Side s) const { return glue_[sq][s]; }
  // Gluing as given in the spec file.
  SideRef cross_raw(int sq, Side s) const { return glue_raw_[sq][s]; }

  int euler_characteristic() const { return chi_; }
  int genus() const { return (2 - chi_) / 2; }

  struct Cone {
    int vclass;
    int corners;  // cone angle = corners * pi/2
  };
  const std::vector<Cone>& cones() const { return cones_; }

  int num_corner_classes() const { return n_vclass_; }
  int corner_class(int sq, int corner) const { return vclass_[4 * sq + corner]; }
  bool is_cone_class(int vclass) const { return cone_of_class_[vclass]; }
  // CCW fan of quarters (square, corner) around a corner class.
  const std::vector<std::pair<int, int>>& fan(int vclass) const {
    return fans_[vclass];
  }

  std::string info_json() const;  // genus, cones, flags

 private:
  friend FlatSurface make_single_cell_torus(cplx tau);
  int nsq_ = 0;
  cplx tau_{0.0, 1.0};
  bool holonomy_trivial_ = true;
  std::vector<std::array<SideRef, 4>> glue_, glue_raw_;
  int chi_ = 0, n_vclass_ = 0;
  std::vector<int> vclass_;  // 4*sq + corner -> class
  std::vector<char> cone_of_class_;
  std::vector<Cone> cones_;
  std::vector<std::vector<std::pair<int, int>>> fans_;
  void finish();  // derive classes, fans, chi
};

FlatSurface make_single_cell_torus(cplx tau);

// Bundled specs.
std::string unit_torus_spec();
std::string pillow_g2_spec();     // the 8-square genus-2 pillow
std::string genus3_4cone_spec();  // 8-square genus-3 surface with four 4pi cones

// ---------------------------------------------------------------------------
// Grid walks.  The m-refined grid on a surface has vertices at (sq, gx, gy),
// gx,gy in [0,m], identified across gluings.  Scaled chart coordinates put
// grid lines at multiples of 4, transversality offsets at +1 and dimer
// vertices at +2, so every crossing test is exact integer arithmetic.

class MeshIndex {
 public:
  MeshIndex(const FlatSurface& s, int mesh);
  int mesh() const { return m_; }
  int count() const { return count_; }
  int id(int sq, int gx, int gy) const;
  bool is_cone(int vid) const { return cone_[vid]; }
  // some chart witness of the class
  std::array<int, 3> witness(int vid) const { return witness_[vid]; }

 private:
  const FlatSurface* s_;
  int m_, count_ = 0;
  std::vector<int> ids_;
  std::vector<char> cone_;
  std::vector<std::array<int, 3>> witness_;
};

struct Step {
  int sq;        // chart holding the whole step
  int gx, gy;    // start grid point in that chart
  Side dir;
};

// Step with a normalized witness: the step and its NE-offset line stay in one
// chart.  (sq,gx,gy) may be any chart representation of the start vertex.
Step make_step(const FlatSurface& s, int mesh, int sq, int gx, int gy, Side dir);

struct GridWalk {
  int mesh = 1;
  std::vector<Step> steps;
  bool closed_checked = false;
};

// Step-wise walk construction across gluings.
class GridWalker {
 public:
  GridWalker(const FlatSurface& s, int mesh, int sq, int gx, int gy);
  void move(Side dir);
  GridWalk take();
  std::array<int, 3> position() const { return {sq_, gx_, gy_}; }

 private:
  const FlatSurface* s_;
  GridWalk w_;
  int sq_, gx_, gy_;
};

// Subdivide each step into k substeps (mesh *= k).
GridWalk subdivide(const GridWalk& w, int k);
GridWalk reversed(const FlatSurface& s, const GridWalk& w);
// Concatenation of closed walks based at a common point.
GridWalk concat(const GridWalk& a, const GridWalk& b);

// Vertex-class sequence visited by the walk (one entry per step start).
std::vector<int> walk_vertices(const FlatSurface& s, const MeshIndex& mi,
                               const GridWalk& w);
bool walk_is_closed(const FlatSurface& s, const GridWalk& w);

// Total turning of the walk in radians (exact multiple of pi/2 for square
// cells).  Exact for immersed cycles (simple, no backtracks); well-defined
// mod 2*pi in general.
double winding(const FlatSurface& s, const GridWalk& w);

// Signed crossing count of walk c2 (deformed to the NE offset) with walk c1
// kept on the skeleton; equals the algebraic intersection number c1 . c2 of
// the homology classes.  Walks must share the mesh.
long long intersection_number(const FlatSurface& s, const GridWalk& c1,
                              const GridWalk& c2);

// Axis-aligned integer segment in a chart, used by crossing machinery.
struct ChartSeg {
  int sq;
  long long x0, y0, x1, y1;  // scaled coords; axis-aligned, directed
};

// Offset (NE) polyline pieces of a walk; grid-line pieces of a walk (all
// chart representations).
std::vector<ChartSeg> offset_segments(const FlatSurface& s, const GridWalk& w);
std::vector<ChartSeg> gridline_segments(const FlatSurface& s, const GridWalk& w);

// Signed crossings of a directed transversal segment (odd coordinates, e.g. a
// dimer edge) with the walk kept on grid lines: sum of sign(det[d_seg, d_walk]).
long long crossings_with_walk(const FlatSurface& s, const GridWalk& walk,
                              const std::vector<ChartSeg>& transversal);

// Rewrites the walk so it never visits cone vertex classes, detouring along
// the link of each cone.  Requires mesh >= 2.
GridWalk avoid_cones(const FlatSurface& s, const GridWalk& w);

// Splits a closed walk into vertex-simple loops after cancelling backtracks.
std::vector<GridWalk> simple_decomposition(const FlatSurface& s,
                                           const GridWalk& w);

// ---------------------------------------------------------------------------

struct HomologyBasis {
  int g = 0;
  std::vector<GridWalk> cycles;  // A_1..A_g, B_1..B_g at mesh 2, cone-free
  std::vector<std::vector<long long>> intersection;  // 2g x 2g, checked
};

HomologyBasis homology_basis(const FlatSurface& s);

struct CutSystem {
  std::vector<GridWalk> cuts;  // mesh 1 paths pairing cone classes
};

CutSystem cut_system(const FlatSurface& s);

// Intersection of a closed walk with the (open) cut paths.
long long cut_crossings(const FlatSurface& s, const CutSystem& cuts,
                        const GridWalk& c);

// q0 on the homology class of a closed cone-free walk:
//   wind/2pi + C.(gamma_1+...+gamma_{g-1}) + 1 mod 2
// evaluated through the simple-loop decomposition.
int q0_of_walk(const FlatSurface& s, const CutSystem& cuts, const GridWalk& c);

}  // namespace flatdimers

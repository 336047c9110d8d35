#pragma once

#include "flatdimers/graph.hpp"
#include "flatdimers/linalg.hpp"

namespace flatdimers {

struct QuadFormChar;  // height.hpp

// Twist periods (a, b) with a_j = pi^{-1} Int_{A_j} Im alpha and likewise b.
// Half-integer vectors are the H^1(Sigma, Z/2Z) classes.
struct TwistVector {
  std::vector<double> a, b;
  static TwistVector zero(int g) { return {std::vector<double>(g, 0.0),
                                           std::vector<double>(g, 0.0)}; }
  // bit j of l: 2*a_j; bit g+j: 2*b_j
  static TwistVector half_class(int g, unsigned l);
  // gauge form of the hexagonal lattice on the N-torus
  static TwistVector hex_gauge_form(int n_param);
  TwistVector plus(const TwistVector& o) const;
  bool is_integer() const;
  int genus() const { return int(a.size()); }
};

// Kasteleyn operator: per-edge entries
//   (dual edge complex length) * (-1)^{edge . cuts} * cocycle phase,
// the cocycle carrying alpha_G plus any twist, supported on edges crossing
// the homology representatives.
class KasteleynMatrix {
 public:
  // Verifies the Kasteleyn condition on every face and gauge-reality; if the
  // latter fails, searches the 2^{2g} half-period corrections of alpha_G.
  static KasteleynMatrix build(const DimerGraph& g, const TwistVector& alpha_g);

  const DimerGraph& graph() const { return *g_; }
  const TwistVector& gauge_form() const { return alpha_g_; }
  const TwistVector& twist() const { return twist_; }
  bool gauge_was_corrected() const { return corrected_; }

  KasteleynMatrix twisted(const TwistVector& t) const;

  cplx entry(int edge) const { return entries_[edge]; }
  // rows: white vertices, cols: black, both sorted by (square, cy, cx);
  // parallel edges accumulate.
  Mat dense() const;
  cplx det() const { return lu_det(dense()); }

  void check_kasteleyn_condition(double tol = 1e-9) const;
  void check_gauge_real(double tol = 1e-9) const;

 private:
  const DimerGraph* g_ = nullptr;
  TwistVector alpha_g_, twist_;
  bool corrected_ = false;
  std::vector<cplx> entries_;
  std::vector<int> worder_, border_;  // sorted vertex ids
  std::vector<int> wrow_, bcol_;      // vertex id -> row/col
  void fill_entries();
  friend struct ZTableBuilder;
 public:
  int row_of_white(int v) const { return wrow_[v]; }
  int col_of_black(int v) const { return bcol_[v]; }
};

// Cocycle phase correction linking twisted determinants to height-period
// characteristic functions: corr(t) = exp(2 pi i sum_j [a_j c_{B_j} - b_j c_{A_j}])
// with c_C the angle-flow flux through C plus twice the alpha_G period.
cplx twist_correction(const DimerGraph& g, const TwistVector& alpha_g,
                      const TwistVector& t);

// All 2^{2g} signed partition functions, phase-aligned so that
// 2^{-g} sum_l (-1)^{Arf(q0+l)} Z_l equals the matching-weight sum.
struct ZTable {
  int g = 0;
  cplx eps;                   // det K = eps * (signed expansion)
  double z = 0.0;             // partition function (may over/underflow; see log2_z)
  double log2_z = 0.0;
  std::vector<Sdet> dets;     // raw det K_{t_l}, exponent-tracked
  std::vector<double> zl_over_z;  // aligned real Z_{alpha_l} / Z
  std::vector<int> arf;       // Arf(q0 + l)
  double max_imag = 0.0;      // alignment residual diagnostic
};

ZTable signed_partition_functions(const KasteleynMatrix& k,
                                  const QuadFormChar& q0);

// P[e covered] = w_e d/dw_e log Z via the signed combination; singular
// twisted matrices fall back to the adjugate.
std::vector<double> edge_probabilities(const KasteleynMatrix& k,
                                       const QuadFormChar& q0);

}  // namespace flatdimers

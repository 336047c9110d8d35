#pragma once

#include <map>

#include "flatdimers/kasteleyn.hpp"

namespace flatdimers {

// Antisymmetric edge function, stored on the w->b orientation.
struct Flow {
  std::vector<double> val;
};

Flow dimer_flow(const DimerGraph& g, const DimerCover& d);
// f^A(wb) = theta/2pi with theta the angle at b subtended by the dual edge;
// div f^A = +1 on white, -1 on black vertices.
Flow angle_flow(const DimerGraph& g);
double divergence(const DimerGraph& g, const Flow& f, int vertex);

// Periods of the 1-form of `f` minus the alpha_G correction:
//   Int_{C_j} = sum_e cross(e, C_j) f(e) - 2 * (alpha_G period along C_j).
std::vector<double> period_vector(const DimerGraph& g, const Flow& f,
                                  const TwistVector& alpha_g);

// Integer height periods of a cover: periods of f_D - f^A corrected by
// alpha_G; throws if they fail to be integers.
std::vector<long long> height_periods(const DimerGraph& g, const DimerCover& d,
                                      const TwistVector& alpha_g);

// Characteristics (2a0, 2b0) of the quadratic form q0 with
//   q0(m) = sum_i m^A_i m^B_i + 2a0.m^B + 2b0.m^A  mod 2
// on integer period vectors.
struct QuadFormChar {
  std::vector<int> a2, b2;
  int g() const { return int(a2.size()); }
  int q0(const std::vector<long long>& ma, const std::vector<long long>& mb) const;
  int arf_shifted(unsigned l) const;  // Arf(q0 + l)
};

// Primary path: windings of the basis cycles plus cut crossings.
QuadFormChar q0_characteristics(const FlatSurface& s, const HomologyBasis& basis,
                                const CutSystem& cuts);

// Verification path: the unique (a0, b0, eps) matching the determinant
// expansion against enumeration on a small graph, across all half-period
// twists.  Throws if none or several match.
struct Calibration {
  QuadFormChar q0;
  cplx eps;
};
Calibration calibrate_q0(const KasteleynMatrix& k);

// Exact sector law by Fourier inversion of twisted determinants over the
// grid {k/(2M+1)}^{2g}.  Keys are integer period vectors (A then B parts).
std::map<std::vector<long long>, double> sector_distribution(
    const KasteleynMatrix& k, const QuadFormChar& q0, int bound);

}  // namespace flatdimers

#pragma once

#include "flatdimers/linalg.hpp"
#include "flatdimers/surface.hpp"

namespace flatdimers {

// Harmonic representative on the m-refined grid complex (cells split by the
// (tau - 1) diagonal, cotangent conductances).  Edge order: per cell
// 3*cell + {0: x-edge P00->P10, 1: y-edge P00->P01, 2: diagonal P10->P01}.
struct Harmonic1Form {
  int mesh = 0;
  std::vector<double> val;       // per oriented edge
  double closed_residual = 0.0;  // max face-sum
  double coclosed_residual = 0.0;
};

struct PeriodMatrix {
  Mat omega;       // g x g, A-periods normalized to identity
  int mesh = 0;
  double sym_residual = 0.0;
  double bilinear_residual = 0.0;  // max |Im Omega - (i/2) Int w ^ conj(w)|
  bool im_positive = false;
};

// One harmonic form per basis cycle (its Poincare dual class), solved by
// conjugate gradients to tolerance `tol`.
std::vector<Harmonic1Form> harmonic_basis(const FlatSurface& s,
                                          const HomologyBasis& basis, int mesh,
                                          double tol = 1e-10);

// Integer period matrix of the harmonic duals against the basis cycles
// (unimodularity is the duality check).
std::vector<std::vector<double>> harmonic_periods(const FlatSurface& s,
                                                  const HomologyBasis& basis,
                                                  int mesh,
                                                  const std::vector<Harmonic1Form>& forms);

// Period matrix at a single mesh, with self-diagnostics.
PeriodMatrix period_matrix_at_mesh(const FlatSurface& s,
                                   const HomologyBasis& basis, int mesh);

// Richardson extrapolation over meshes m and 2m (first order); also enforces
// the mesh-doubling convergence gate when `check_gate`.
struct PeriodMatrixResult {
  PeriodMatrix coarse, fine;
  Mat omega;  // extrapolated
  double doubling_ratio = 0.0;
};
PeriodMatrixResult period_matrix(const FlatSurface& s, const HomologyBasis& basis,
                                 int mesh, bool check_gate = false);

}  // namespace flatdimers

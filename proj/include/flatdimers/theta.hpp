#pragma once

#include <vector>

#include "flatdimers/linalg.hpp"

namespace flatdimers {

// Riemann theta with characteristics a,b in R^g:
//   theta[a;b](z, Omega) = sum_m exp( pi i (m+a)^t Omega (m+a)
//                                     + 2 pi i (z-b)^t (m+a) ).
// Truncation radius is chosen from lambda_min(Im Omega) with an explicit
// Gaussian tail bound below `tol`.
cplx theta(const std::vector<double>& a, const std::vector<double>& b,
           const std::vector<cplx>& z, const Mat& omega, double tol = 1e-14);

// Arf invariant of the quadratic form with half-integer characteristics,
// given as 2a, 2b in {0,1}^g: sum_i (2a_i)(2b_i) mod 2.
int arf(const std::vector<int>& a2, const std::vector<int>& b2);

// theta[a;b](z) = prefactor * theta(shifted z) with zero characteristics.
struct ThetaReduction {
  cplx prefactor;
  std::vector<cplx> shifted_z;
};
ThetaReduction theta_reduce(const std::vector<double>& a,
                            const std::vector<double>& b,
                            const std::vector<cplx>& z, const Mat& omega);

// smallest eigenvalue of the real symmetric matrix Im Omega
double min_eig_sym(const std::vector<double>& t, int n);

}  // namespace flatdimers

#pragma once

#include <vector>

#include "flatdimers/util.hpp"

namespace flatdimers {

// Dense complex matrix, column-major.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}
  int rows() const { return r_; }
  int cols() const { return c_; }
  cplx& operator()(int i, int j) { return a_[size_t(j) * r_ + i]; }
  const cplx& operator()(int i, int j) const { return a_[size_t(j) * r_ + i]; }
  const std::vector<cplx>& data() const { return a_; }

 private:
  int r_ = 0, c_ = 0;
  std::vector<cplx> a_;
};

// LU with partial pivoting (max |.|, ties -> lowest row index), in place.
// Returns the permutation sign; rank-deficient columns leave a zero pivot.
int lu_factor(Mat& m, std::vector<int>& piv);

// det by LU; deterministic for a fixed entry ordering.
cplx lu_det(const Mat& m);

// Determinant with a tracked power-of-two exponent, immune to under/overflow:
// det = mant * 2^exp2 with mant either 0 or |mant| in [1, 2).
struct Sdet {
  cplx mant{0.0, 0.0};
  long long exp2 = 0;
  bool zero() const { return mant == cplx(0.0, 0.0); }
  double log2_abs() const;               // -inf if zero
  cplx unit() const;                     // mant/|mant| (phase), 0 if zero
  double ratio_to(const Sdet& o) const;  // |*this| / |o|
  cplx ratio_c(const Sdet& o) const;     // *this / o as complex
};
Sdet lu_det_scaled(const Mat& m);

// Inverse by LU; throws on (numerically) singular input.
Mat lu_inverse(const Mat& m);

// Adjugate adj(M) with M * adj(M) = det(M) * I.  Works for nonsingular and
// rank n-1 matrices (rank < n-1 gives the zero matrix).
Mat adjugate(const Mat& m);

// Sparse symmetric real matrix in CSR, for graph Laplacians.
struct SparseSym {
  int n = 0;
  std::vector<int> rowptr, col;
  std::vector<double> val;
  void mul(const std::vector<double>& x, std::vector<double>& y) const;
};

// Conjugate gradients for positive semidefinite systems (e.g. Laplacians with
// the constant nullspace; rhs must be mean-free).  Returns iterations used.
int conjugate_gradient(const SparseSym& a, const std::vector<double>& b,
                       std::vector<double>& x, double tol, int maxit);

// Solves the g x g complex symmetric system A X = B by LU (small g).
Mat solve(const Mat& a, const Mat& b);

// Cholesky test: true iff the real symmetric matrix is positive definite.
bool is_positive_definite(const std::vector<double>& a, int n);

}  // namespace flatdimers

#include "flatdimers/linalg.hpp"
#include <limits>

#include <cmath>

namespace flatdimers {

int lu_factor(Mat& m, std::vector<int>& piv) {
  int n = m.rows();
  piv.assign(n, 0);
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv[k] = p;
    if (p != k) {
      sign = -sign;
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
    }
    cplx pivot = m(k, k);
    if (pivot == cplx(0.0, 0.0)) continue;
    for (int i = k + 1; i < n; ++i) {
      cplx l = m(i, k) / pivot;
      m(i, k) = l;
      if (l == cplx(0.0, 0.0)) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return sign;
}

cplx lu_det(const Mat& m) {
  if (m.rows() != m.cols()) throw Error("lu_det: matrix not square");
  Mat a = m;
  std::vector<int> piv;
  int sign = lu_factor(a, piv);
  cplx d(double(sign), 0.0);
  for (int k = 0; k < a.rows(); ++k) d *= a(k, k);
  return d;
}

double Sdet::log2_abs() const {
  if (zero()) return -std::numeric_limits<double>::infinity();
  return std::log2(std::abs(mant)) + double(exp2);
}

cplx Sdet::unit() const { return zero() ? cplx(0, 0) : mant / std::abs(mant); }

double Sdet::ratio_to(const Sdet& o) const {
  if (zero()) return 0.0;
  if (o.zero()) throw Error("Sdet: ratio to zero");
  return std::abs(mant) / std::abs(o.mant) * std::exp2(double(exp2 - o.exp2));
}

cplx Sdet::ratio_c(const Sdet& o) const {
  if (zero()) return cplx(0, 0);
  if (o.zero()) throw Error("Sdet: ratio to zero");
  return mant / o.mant * std::exp2(double(exp2 - o.exp2));
}

Sdet lu_det_scaled(const Mat& m) {
  if (m.rows() != m.cols()) throw Error("lu_det_scaled: matrix not square");
  Mat a = m;
  std::vector<int> piv;
  int sign = lu_factor(a, piv);
  Sdet d;
  d.mant = cplx(double(sign), 0.0);
  d.exp2 = 0;
  for (int k = 0; k < a.rows(); ++k) {
    d.mant *= a(k, k);
    if (d.mant == cplx(0.0, 0.0)) return Sdet{};
    int e = 0;
    std::frexp(std::abs(d.mant), &e);
    d.mant = cplx(std::ldexp(d.mant.real(), -(e - 1)),
                  std::ldexp(d.mant.imag(), -(e - 1)));
    d.exp2 += e - 1;
  }
  return d;
}

static void lu_solve_inplace(const Mat& lu, const std::vector<int>& piv,
                             std::vector<cplx>& x) {
  int n = lu.rows();
  for (int k = 0; k < n; ++k)
    if (piv[k] != k) std::swap(x[k], x[piv[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) x[i] -= lu(i, k) * x[k];
  for (int k = n - 1; k >= 0; --k) {
    x[k] /= lu(k, k);
    for (int i = 0; i < k; ++i) x[i] -= lu(i, k) * x[k];
  }
}

Mat lu_inverse(const Mat& m) {
  int n = m.rows();
  Mat a = m;
  std::vector<int> piv;
  lu_factor(a, piv);
  for (int k = 0; k < n; ++k)
    if (a(k, k) == cplx(0.0, 0.0)) throw Error("lu_inverse: singular matrix");
  Mat inv(n, n);
  std::vector<cplx> e(n);
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx(0.0, 0.0));
    e[j] = 1.0;
    lu_solve_inplace(a, piv, e);
    for (int i = 0; i < n; ++i) inv(i, j) = e[i];
  }
  return inv;
}

Mat adjugate(const Mat& m) {
  int n = m.rows();
  Mat adj(n, n);
  if (n == 0) return adj;
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  Mat a = m;
  std::vector<int> piv;
  lu_factor(a, piv);
  int zeros = 0, zk = -1;
  double scale = 0.0;
  for (int k = 0; k < n; ++k) {
    double v = std::abs(a(k, k));
    scale = std::max(scale, v);
    if (v == 0.0) {
      ++zeros;
      zk = k;
    }
  }
  (void)zk;
  double tiny = scale * 1e-13;
  int near_zero = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(a(k, k)) <= tiny) ++near_zero;
  if (zeros == 0 && near_zero == 0) {
    cplx det = lu_det(m);
    Mat inv = lu_inverse(m);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) adj(i, j) = det * inv(i, j);
    return adj;
  }
  if (near_zero > 1 || zeros > 1) return adj;  // rank < n-1: adjugate is 0
  // rank n-1: adj = c * x y^T with M x = 0, y^T M = 0.  The scale c is fixed
  // by one explicitly computed cofactor.
  // Null vectors via inverse iteration on the shifted matrix.
  auto null_vec = [&](const Mat& mm) {
    int nn = mm.rows();
    Mat s = mm;
    double sc = 0.0;
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < nn; ++i) sc = std::max(sc, std::abs(s(i, j)));
    double shift = (sc > 0 ? sc : 1.0) * 1e-14;
    for (int k = 0; k < nn; ++k) s(k, k) += shift;
    Mat inv = lu_inverse(s);
    std::vector<cplx> v(nn, cplx(1.0, 0.0)), w(nn);
    for (int it = 0; it < 60; ++it) {
      for (int i = 0; i < nn; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < nn; ++j) acc += inv(i, j) * v[j];
        w[i] = acc;
      }
      double norm = 0.0;
      for (auto& x : w) norm += std::norm(x);
      norm = std::sqrt(norm);
      for (int i = 0; i < nn; ++i) v[i] = w[i] / norm;
    }
    return v;
  };
  std::vector<cplx> x = null_vec(m);
  Mat mt(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) mt(i, j) = m(j, i);
  std::vector<cplx> y = null_vec(mt);
  // cofactor C_{ij} = (-1)^{i+j} det(M with row i, col j removed) at the
  // largest |x_j||y_i| position.
  int bi = 0, bj = 0;
  double bv = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = std::abs(x[j]) * std::abs(y[i]);
      if (v > bv) {
        bv = v;
        bi = i;
        bj = j;
      }
    }
  Mat minor(n - 1, n - 1);
  for (int j = 0, jj = 0; j < n; ++j) {
    if (j == bj) continue;
    for (int i = 0, ii = 0; i < n; ++i) {
      if (i == bi) continue;
      minor(ii, jj) = m(i, j);
      ++ii;
    }
    ++jj;
  }
  cplx cof = lu_det(minor);
  if ((bi + bj) % 2) cof = -cof;
  // adj(M)_{ji} pattern: adj = c x y^T with adj(bj, bi) = cof.
  cplx c = cof / (x[bj] * y[bi]);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) adj(j, i) = c * x[j] * y[i];
  return adj;
}

void SparseSym::mul(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

int conjugate_gradient(const SparseSym& a, const std::vector<double>& b,
                       std::vector<double>& x, double tol, int maxit) {
  int n = a.n;
  x.assign(n, 0.0);
  std::vector<double> r = b, p = b, ap(n);
  double rr = 0.0, bnorm = 0.0;
  for (int i = 0; i < n; ++i) {
    rr += r[i] * r[i];
    bnorm += b[i] * b[i];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return 0;
  int it = 0;
  for (; it < maxit; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) break;
    a.mul(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;
    double alpha = rr / pap;
    double rr_new = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr_new += r[i] * r[i];
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (it >= maxit) throw Error("conjugate_gradient: no convergence");
  return it;
}

Mat solve(const Mat& a, const Mat& b) {
  int n = a.rows();
  Mat lu = a;
  std::vector<int> piv;
  lu_factor(lu, piv);
  for (int k = 0; k < n; ++k)
    if (lu(k, k) == cplx(0.0, 0.0)) throw Error("solve: singular matrix");
  Mat x(n, b.cols());
  std::vector<cplx> column(n);
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < n; ++i) column[i] = b(i, j);
    lu_solve_inplace(lu, piv, column);
    for (int i = 0; i < n; ++i) x(i, j) = column[i];
  }
  return x;
}

bool is_positive_definite(const std::vector<double>& a, int n) {
  std::vector<double> l(size_t(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = a[size_t(j) * n + j];
    for (int k = 0; k < j; ++k) d -= l[size_t(j) * n + k] * l[size_t(j) * n + k];
    if (d <= 0.0) return false;
    double dj = std::sqrt(d);
    l[size_t(j) * n + j] = dj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[size_t(i) * n + j];
      for (int k = 0; k < j; ++k) s -= l[size_t(i) * n + k] * l[size_t(j) * n + k];
      l[size_t(i) * n + j] = s / dj;
    }
  }
  return true;
}

}  // namespace flatdimers

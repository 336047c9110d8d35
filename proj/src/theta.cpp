#include "flatdimers/theta.hpp"

#include <cmath>

namespace flatdimers {

double min_eig_sym(const std::vector<double>& t, int n) {
  // Jacobi eigenvalue iteration; n is small (genus).
  std::vector<double> a = t;
  auto at = [&](int i, int j) -> double& { return a[size_t(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        double theta_r = (at(q, q) - at(p, p)) / (2 * at(p, q));
        double sgn = theta_r >= 0 ? 1.0 : -1.0;
        double tt = sgn / (std::abs(theta_r) + std::sqrt(theta_r * theta_r + 1));
        double c = 1.0 / std::sqrt(tt * tt + 1), s = tt * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  double lo = at(0, 0);
  for (int i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
  return lo;
}

cplx theta(const std::vector<double>& a, const std::vector<double>& b,
           const std::vector<cplx>& z, const Mat& omega, double tol) {
  int g = omega.rows();
  if (int(a.size()) != g || int(b.size()) != g || int(z.size()) != g)
    throw Error("theta: dimension mismatch");
  std::vector<double> im(size_t(g) * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) im[size_t(i) * g + j] = std::imag(omega(i, j));
  if (!is_positive_definite(im, g))
    throw Error("theta: Im Omega is not positive definite");
  double lam = min_eig_sym(im, g);
  if (lam <= 0) throw Error("theta: Im Omega is not positive definite");
  // Tail bound: |term(m)| <= exp(-pi lam |m+a|^2 + 2 pi |Im z| |m+a|)
  double amax = 0.0, zmax = 0.0;
  for (int i = 0; i < g; ++i) {
    amax = std::max(amax, std::abs(a[i]));
    zmax = std::max(zmax, std::abs(std::imag(z[i])));
  }
  double target = -std::log(tol) + 12.0;
  int R = 2;
  for (; R < 200; ++R) {
    double r = R - amax;
    if (r <= 0) continue;
    double expo = kPi * lam * r * r - 2 * kPi * zmax * (R + amax) -
                  g * std::log(2.0 * R + 1.0) - std::log(8.0 * g * R);
    if (expo > target) break;
  }
  if (R >= 200) throw Error("theta: truncation radius too large");
  std::vector<int> m(g, -R);
  cplx sum = 0.0;
  for (;;) {
    cplx e = 0.0;
    for (int i = 0; i < g; ++i) {
      double mi = m[i] + a[i];
      cplx acc = 0.0;
      for (int j = 0; j < g; ++j) acc += omega(i, j) * (m[j] + a[j]);
      e += cplx(0, kPi) * mi * acc;
      e += cplx(0, 2 * kPi) * (z[i] - b[i]) * mi;
    }
    sum += std::exp(e);
    int i = 0;
    while (i < g && m[i] == R) {
      m[i] = -R;
      ++i;
    }
    if (i == g) break;
    ++m[i];
  }
  return sum;
}

int arf(const std::vector<int>& a2, const std::vector<int>& b2) {
  if (a2.size() != b2.size()) throw Error("arf: dimension mismatch");
  int s = 0;
  for (size_t i = 0; i < a2.size(); ++i) {
    if ((a2[i] & ~1) || (b2[i] & ~1))
      throw Error("arf: characteristics must be half-integer");
    s ^= a2[i] & b2[i];
  }
  return s;
}

ThetaReduction theta_reduce(const std::vector<double>& a,
                            const std::vector<double>& b,
                            const std::vector<cplx>& z, const Mat& omega) {
  int g = omega.rows();
  ThetaReduction r;
  r.shifted_z.resize(g);
  cplx e = 0.0;
  for (int i = 0; i < g; ++i) {
    cplx oa = 0.0;
    for (int j = 0; j < g; ++j) oa += omega(i, j) * a[j];
    r.shifted_z[i] = z[i] - b[i] + oa;
    e += cplx(0, kPi) * a[i] * oa;
    e += cplx(0, 2 * kPi) * (z[i] - b[i]) * a[i];
  }
  r.prefactor = std::exp(e);
  return r;
}

}  // namespace flatdimers

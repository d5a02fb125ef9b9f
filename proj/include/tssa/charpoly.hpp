#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "tssa/matrix.hpp"

namespace tssa {

// Monic characteristic polynomial: lambda^n + c1 lambda^{n-1} + ... + cn.
// coeffs holds c1..cn; the leading 1 is implicit.
template <class S>
struct CharPoly {
  std::vector<S> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()); }

  const S& c(int m) const {  // 1-based, matching the usual subscripts
    if (m < 1 || m > degree()) throw std::invalid_argument("CharPoly: index out of range");
    return coeffs[static_cast<std::size_t>(m - 1)];
  }
};

// c_m = (-1)^m * sum of all order-m principal minors; in particular
// c_1 = -trace and c_n = (-1)^n det.
template <class S>
CharPoly<S> charpoly_minors(const SquareMatrix<S>& m) {
  CharPoly<S> out;
  const int n = m.dim();
  out.coeffs.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    S sum = (k == 1) ? -m.trace() : principal_minor_sum(m, k);
    if (k != 1 && k % 2 == 1) sum = -sum;
    out.coeffs.push_back(std::move(sum));
  }
  return out;
}

// Faddeev-LeVerrier recursion; structurally independent of the minors path,
// used to cross-validate it.  Real scalars only.
inline CharPoly<double> charpoly_leverrier(const SquareMatrix<double>& a) {
  const int n = a.dim();
  CharPoly<double> out;
  out.coeffs.reserve(static_cast<std::size_t>(n));
  SquareMatrix<double> m = a;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      // m = a * (m_prev + c_{k-1} I)
      SquareMatrix<double> shifted = m;
      const double ck = out.coeffs.back();
      for (int i = 0; i < n; ++i) shifted.at(i, i) += ck;
      SquareMatrix<double> next(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int t = 0; t < n; ++t) acc += a.at(i, t) * shifted.at(t, j);
          next.at(i, j) = acc;
        }
      m = next;
    }
    out.coeffs.push_back(-m.trace() / k);
  }
  return out;
}

inline CharPoly<double> substitute(const CharPoly<GammaPoly>& p, double gamma) {
  CharPoly<double> out;
  out.coeffs.reserve(p.coeffs.size());
  for (const GammaPoly& c : p.coeffs) out.coeffs.push_back(c.eval(gamma));
  return out;
}

inline double eval(const CharPoly<double>& p, double x) {
  double acc = 1.0;
  for (double c : p.coeffs) acc = acc * x + c;
  return acc;
}

inline std::complex<double> eval(const CharPoly<double>& p, std::complex<double> x) {
  std::complex<double> acc = 1.0;
  for (double c : p.coeffs) acc = acc * x + c;
  return acc;
}

}  // namespace tssa

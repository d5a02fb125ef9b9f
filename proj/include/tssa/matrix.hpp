#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tssa/gamma_poly.hpp"

namespace tssa {

// Ring hooks used by the generic determinant and Routh-array code.  The ring
// needs +, -, * and these: a zero/one, a negligibility test, a magnitude for
// pivot checks, and a division (exact for reals, asymptotic long division
// for Gamma-polynomials, where it is exact in the fraction-free elimination
// contexts we use it in).
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool is_real = true;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return x == 0.0; }
  static double magnitude(double x) { return std::abs(x); }
  static double div(double a, double b) { return a / b; }
};

template <>
struct ScalarTraits<GammaPoly> {
  static constexpr bool is_real = false;
  static GammaPoly zero() { return GammaPoly(); }
  static GammaPoly one() { return GammaPoly(1.0); }
  static bool is_zero(const GammaPoly& x) { return x.is_zero(); }
  static double magnitude(const GammaPoly& x) { return x.max_abs_coeff(); }
  static GammaPoly div(const GammaPoly& a, const GammaPoly& b) {
    return gp_div_asymptotic(a, b);
  }
};

// Dense n x n matrix over a scalar ring, n in [2, 8].  The cap matches the
// intended use (4-6 state models); subset enumeration over principal minors
// stays cheap at this size.
template <class S>
class SquareMatrix {
 public:
  static constexpr int kMinDim = 2;
  static constexpr int kMaxDim = 8;

  explicit SquareMatrix(int n)
      : n_(checked(n)),
        e_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
           ScalarTraits<S>::zero()) {}

  SquareMatrix(int n, std::vector<S> entries) : n_(checked(n)), e_(std::move(entries)) {
    if (e_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
      throw std::invalid_argument("SquareMatrix: entries size must be n^2");
  }

  int dim() const { return n_; }

  S& at(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  const S& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }

  S trace() const {
    S t = ScalarTraits<S>::zero();
    for (int i = 0; i < n_; ++i) t = t + at(i, i);
    return t;
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (const S& v : e_) m = std::max(m, ScalarTraits<S>::magnitude(v));
    return m;
  }

 private:
  static int checked(int n) {
    if (n < kMinDim || n > kMaxDim)
      throw std::invalid_argument("SquareMatrix: dimension must be in [2, 8]");
    return n;
  }

  int n_;
  std::vector<S> e_;
};

namespace detail {

// Determinant of a k x k buffer (row-major), k >= 1.  Real scalars: LU with
// partial pivoting; pivots below 1e-13 * max|entry| count as zero.
inline double det_buffer(std::vector<double>& a, int k) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  const double tiny = 1e-13 * scale;
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    double best = std::abs(a[static_cast<std::size_t>(c) * k + c]);
    for (int r = c + 1; r < k; ++r) {
      const double mag = std::abs(a[static_cast<std::size_t>(r) * k + c]);
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (best < tiny) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j)
        std::swap(a[static_cast<std::size_t>(piv) * k + j],
                  a[static_cast<std::size_t>(c) * k + j]);
      det = -det;
    }
    const double p = a[static_cast<std::size_t>(c) * k + c];
    det *= p;
    for (int r = c + 1; r < k; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * k + c] / p;
      if (factor == 0.0) continue;
      for (int j = c; j < k; ++j)
        a[static_cast<std::size_t>(r) * k + j] -= factor * a[static_cast<std::size_t>(c) * k + j];
    }
  }
  return det;
}

// Cofactor expansion along the first row; used for small polynomial
// matrices where no divisions at all are wanted.
template <class S>
S det_cofactor(const std::vector<S>& a, int k) {
  if (k == 1) return a[0];
  if (k == 2) return a[0] * a[3] - a[1] * a[2];
  S acc = ScalarTraits<S>::zero();
  std::vector<S> sub(static_cast<std::size_t>(k - 1) * (k - 1), ScalarTraits<S>::zero());
  for (int c = 0; c < k; ++c) {
    if (ScalarTraits<S>::is_zero(a[static_cast<std::size_t>(c)])) continue;
    int idx = 0;
    for (int r = 1; r < k; ++r)
      for (int j = 0; j < k; ++j) {
        if (j == c) continue;
        sub[idx++] = a[static_cast<std::size_t>(r) * k + j];
      }
    const S minor = det_cofactor(sub, k - 1);
    const S contrib = a[static_cast<std::size_t>(c)] * minor;
    acc = (c % 2 == 0) ? acc + contrib : acc - contrib;
  }
  return acc;
}

// Polynomial determinants use cofactor expansion at every size the module
// supports (n <= 8).  Fraction-free (Bareiss) elimination was measured to
// lose ~1e-8 relative accuracy here: its exact divisions amplify float
// error whenever a pivot's leading coefficient is small, while the
// division-free expansion stays at ~1e-14 for desk-scale entries.
template <class S>
S det_generic(std::vector<S> a, int k) {
  if constexpr (ScalarTraits<S>::is_real)
    return det_buffer(a, k);
  else
    return det_cofactor(a, k);
}

// Visits all size-m subsets of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

template <class S>
S det(const SquareMatrix<S>& m) {
  const int n = m.dim();
  std::vector<S> buf;
  buf.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) buf.push_back(m.at(i, j));
  return detail::det_generic(std::move(buf), n);
}

// Sum of all order-m principal minors: rows and columns both restricted to
// each size-m index set.
template <class S>
S principal_minor_sum(const SquareMatrix<S>& m, int order) {
  const int n = m.dim();
  if (order < 1 || order > n)
    throw std::invalid_argument("principal_minor_sum: order out of range");
  S acc = ScalarTraits<S>::zero();
  detail::for_each_subset(n, order, [&](const std::vector<int>& idx) {
    std::vector<S> sub;
    sub.reserve(static_cast<std::size_t>(order) * order);
    for (int i : idx)
      for (int j : idx) sub.push_back(m.at(i, j));
    acc = acc + detail::det_generic(std::move(sub), order);
  });
  return acc;
}

inline SquareMatrix<double> substitute(const SquareMatrix<GammaPoly>& m, double gamma) {
  SquareMatrix<double> out(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out.at(i, j) = m.at(i, j).eval(gamma);
  return out;
}

}  // namespace tssa

#pragma once

#include <stdexcept>
#include <vector>

#include "tssa/charpoly.hpp"

namespace tssa {

enum class Stability { Stable, Unstable, Indeterminate };

const char* to_string(Stability s);

// Three-valued stability verdict with the numeric margin that produced it,
// so sweeps can exclude near-boundary points instead of misclassifying them.
struct Verdict {
  Stability state = Stability::Indeterminate;
  double margin = 0.0;

  bool stable() const { return state == Stability::Stable; }
};

// Routh array for a degree-n polynomial: n+1 rows, n/2+1 columns.  Entries
// out of range are taken as zero.  If a first-column pivot is negligible the
// construction stops; zero_pivot marks the array as degenerate and any
// verdict on it is Indeterminate.
template <class S>
struct RouthArray {
  int degree = 0;
  int cols = 0;
  std::vector<std::vector<S>> rows;
  std::vector<S> first_column;
  bool zero_pivot = false;
};

namespace detail {

inline bool pivot_negligible(double pivot, double row_scale) {
  if (pivot == 0.0) return true;
  return std::abs(pivot) <= 1e-13 * row_scale;
}

template <class S>
bool pivot_is_zero(const S& pivot, double row_scale) {
  if constexpr (ScalarTraits<S>::is_real)
    return pivot_negligible(pivot, row_scale);
  else {
    (void)row_scale;
    return ScalarTraits<S>::is_zero(pivot);
  }
}

}  // namespace detail

// Rows 1 and 2 come straight from the coefficients (leading 1 then c2, c4,
// ...; c1 then c3, ...); later rows follow
//   R[i][j] = (R[i-1][1] R[i-2][j+1] - R[i-2][1] R[i-1][j+1]) / R[i-1][1].
template <class S>
RouthArray<S> build_routh(const CharPoly<S>& p) {
  const int n = p.degree();
  if (n < 2) throw std::invalid_argument("build_routh: degree must be >= 2");
  RouthArray<S> a;
  a.degree = n;
  a.cols = n / 2 + 1;
  a.rows.assign(static_cast<std::size_t>(n) + 1,
                std::vector<S>(static_cast<std::size_t>(a.cols), ScalarTraits<S>::zero()));

  a.rows[0][0] = ScalarTraits<S>::one();
  for (int j = 1; j < a.cols; ++j)
    if (2 * j <= n) a.rows[0][static_cast<std::size_t>(j)] = p.c(2 * j);
  for (int j = 0; j < a.cols; ++j)
    if (2 * j + 1 <= n) a.rows[1][static_cast<std::size_t>(j)] = p.c(2 * j + 1);

  int built = 2;
  for (int i = 2; i <= n; ++i) {
    const auto& prev1 = a.rows[static_cast<std::size_t>(i - 1)];
    const auto& prev2 = a.rows[static_cast<std::size_t>(i - 2)];
    double row_scale = 0.0;
    for (const S& v : prev1) row_scale = std::max(row_scale, ScalarTraits<S>::magnitude(v));
    for (const S& v : prev2) row_scale = std::max(row_scale, ScalarTraits<S>::magnitude(v));
    const S& pivot = prev1[0];
    if (detail::pivot_is_zero(pivot, row_scale)) {
      a.zero_pivot = true;
      break;
    }
    for (int j = 0; j < a.cols; ++j) {
      const S upper = (j + 1 < a.cols) ? prev2[static_cast<std::size_t>(j + 1)]
                                       : ScalarTraits<S>::zero();
      const S lower = (j + 1 < a.cols) ? prev1[static_cast<std::size_t>(j + 1)]
                                       : ScalarTraits<S>::zero();
      S num = pivot * upper - prev2[0] * lower;
      a.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          ScalarTraits<S>::div(num, pivot);
    }
    ++built;
  }

  a.first_column.reserve(static_cast<std::size_t>(built));
  for (int i = 0; i < built; ++i) a.first_column.push_back(a.rows[static_cast<std::size_t>(i)][0]);
  return a;
}

// Routh theorem over real scalars: stable iff every first-column entry is
// strictly positive.  Entries within 1e-9 * (max first-column magnitude) of
// zero give Indeterminate; margin is the smallest first-column value.
Verdict verdict(const RouthArray<double>& a);

// Same sign rule applied to the leading coefficients of the first column of
// a Gamma-polynomial array; a leading coefficient pruned to zero gives
// Indeterminate.
Verdict verdict_leading(const RouthArray<GammaPoly>& a);

// Degree-4 Routh-Hurwitz quantities: positivity of all four is equivalent to
// stability.  c1 and q1 are array pivots; either one near zero makes the
// case degenerate.
struct RhDeg4 {
  double c1 = 0.0;
  double c4 = 0.0;
  double q1 = 0.0;  // c1 c2 - c3
  double q2 = 0.0;  // c3 q1 - c1^2 c4
  Verdict verdict;
};
RhDeg4 rh_conditions_deg4(const CharPoly<double>& p);

// Degree-5 successive quantities:
//   q1 = c1 c2 - c3,  q3 = c1 c4 - c5,  q2 = c3 q1 - c1 q3,
//   q4 = q2 q3 - c5 q1^2.
// The first column of the degree-5 array is
//   (1, c1, q1/c1, q2/q1, q4/(c1 q2), c5).
struct RhDeg5 {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
};
RhDeg5 rh_quantities_deg5(const CharPoly<double>& p);

// The expanded single-formula version of q4,
//   c1 [c1c2c3c4 + c2c3c5 + 2c1c4c5 - c3^2c4 - c1^2c4^2 - c1c2^2c5 - c5^2],
// algebraically identical to rh_quantities_deg5().q4.
double q4_full(const CharPoly<double>& p);

}  // namespace tssa

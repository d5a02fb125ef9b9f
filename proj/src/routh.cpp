#include "tssa/routh.hpp"

#include <algorithm>
#include <cmath>

namespace tssa {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

Verdict sign_verdict(const std::vector<double>& values, bool degenerate) {
  double max_mag = 0.0;
  double margin = values.empty() ? 0.0 : values.front();
  for (double v : values) {
    max_mag = std::max(max_mag, std::abs(v));
    margin = std::min(margin, v);
  }
  Verdict out;
  out.margin = margin;
  if (degenerate) {
    out.state = Stability::Indeterminate;
    return out;
  }
  const double thr = 1e-9 * max_mag;
  bool negative = false, marginal = false;
  for (double v : values) {
    if (v < -thr)
      negative = true;
    else if (v <= thr)
      marginal = true;
  }
  if (negative)
    out.state = Stability::Unstable;
  else if (marginal)
    out.state = Stability::Indeterminate;
  else
    out.state = Stability::Stable;
  return out;
}

}  // namespace

Verdict verdict(const RouthArray<double>& a) {
  return sign_verdict(a.first_column, a.zero_pivot);
}

Verdict verdict_leading(const RouthArray<GammaPoly>& a) {
  std::vector<double> leads;
  leads.reserve(a.first_column.size());
  bool pruned = false;
  for (const GammaPoly& e : a.first_column) {
    const LeadingTerm lt = e.leading();
    if (lt.is_zero()) pruned = true;
    leads.push_back(lt.k);
  }
  return sign_verdict(leads, a.zero_pivot || pruned);
}

RhDeg4 rh_conditions_deg4(const CharPoly<double>& p) {
  if (p.degree() != 4) throw std::invalid_argument("rh_conditions_deg4: degree must be 4");
  RhDeg4 out;
  out.c1 = p.c(1);
  out.c4 = p.c(4);
  out.q1 = p.c(1) * p.c(2) - p.c(3);
  out.q2 = p.c(3) * out.q1 - p.c(1) * p.c(1) * p.c(4);

  const double vals[] = {out.c1, out.c4, out.q1, out.q2};
  double max_mag = 0.0, margin = vals[0];
  for (double v : vals) {
    max_mag = std::max(max_mag, std::abs(v));
    margin = std::min(margin, v);
  }
  const double thr = 1e-9 * max_mag;
  out.verdict.margin = margin;
  if (std::abs(out.c1) <= thr || std::abs(out.q1) <= thr) {
    out.verdict.state = Stability::Indeterminate;  // zero pivot in the array
  } else if (out.c1 < 0.0 || out.c4 < -thr || out.q1 < 0.0 || out.q2 < -thr) {
    out.verdict.state = Stability::Unstable;
  } else if (out.c4 <= thr || out.q2 <= thr) {
    out.verdict.state = Stability::Indeterminate;
  } else {
    out.verdict.state = Stability::Stable;
  }
  return out;
}

RhDeg5 rh_quantities_deg5(const CharPoly<double>& p) {
  if (p.degree() != 5) throw std::invalid_argument("rh_quantities_deg5: degree must be 5");
  RhDeg5 q;
  q.q1 = p.c(1) * p.c(2) - p.c(3);
  q.q3 = p.c(1) * p.c(4) - p.c(5);
  q.q2 = p.c(3) * q.q1 - p.c(1) * q.q3;
  q.q4 = q.q2 * q.q3 - p.c(5) * q.q1 * q.q1;
  return q;
}

double q4_full(const CharPoly<double>& p) {
  if (p.degree() != 5) throw std::invalid_argument("q4_full: degree must be 5");
  const double c1 = p.c(1), c2 = p.c(2), c3 = p.c(3), c4 = p.c(4), c5 = p.c(5);
  return c1 * (c1 * c2 * c3 * c4 + c2 * c3 * c5 + 2.0 * c1 * c4 * c5 - c3 * c3 * c4 -
               c1 * c1 * c4 * c4 - c1 * c2 * c2 * c5 - c5 * c5);
}

}  // namespace tssa

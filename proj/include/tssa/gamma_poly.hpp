#pragma once

#include <string>
#include <vector>

namespace tssa {

// Leading term k*G^p of a GammaPoly.  The zero polynomial maps to the
// sentinel (k=0, p=0).
struct LeadingTerm {
  double k = 0.0;
  int p = 0;
  bool is_zero() const { return k == 0.0; }
};

// Polynomial in the large parameter G with real coefficients, stored densely
// by exponent.  This is the scalar ring for asymptotic Jacobians and Routh
// entries: entries are exact polynomials, and only leading() discards
// subdominant terms.
//
// Additions prune structural-cancellation residue: a coefficient survives
// only if its magnitude exceeds kCancelTol times the largest contribution
// absorbed at that exponent.  Exact cancellations (e.g. the G^2 terms of the
// 2x2 fast-block subdeterminant) therefore collapse to a clean zero instead
// of leaving float dust that would masquerade as a leading term.
class GammaPoly {
 public:
  static constexpr double kCancelTol = 1e-10;

  GammaPoly() = default;
  GammaPoly(double constant);  // NOLINT: implicit by design, see ring usage

  static GammaPoly term(double k, int p);

  // Degree of the polynomial, -1 for zero.
  int degree() const;
  bool is_zero() const { return degree() < 0; }
  double coeff(int p) const;
  LeadingTerm leading() const;
  double eval(double gamma) const;
  double max_abs_coeff() const;
  std::size_t term_count() const;

  GammaPoly operator-() const;
  GammaPoly& operator+=(const GammaPoly& o);
  GammaPoly& operator-=(const GammaPoly& o);
  GammaPoly& operator*=(const GammaPoly& o);

  friend GammaPoly operator+(const GammaPoly& a, const GammaPoly& b);
  friend GammaPoly operator-(const GammaPoly& a, const GammaPoly& b);
  friend GammaPoly operator*(const GammaPoly& a, const GammaPoly& b);

  // Polynomial part of a/b as G -> infinity: long division by descending
  // exponent, stopping before negative powers.  Exact when b divides a
  // (the fraction-free elimination case); otherwise the dropped remainder
  // is subdominant to every retained term.
  friend GammaPoly gp_div_asymptotic(const GammaPoly& a, const GammaPoly& b);

 private:
  std::vector<double> c_;  // c_[p] = coefficient of G^p
  void trim();
  void set_coeff(int p, double k);
  static GammaPoly combine(const GammaPoly& a, const GammaPoly& b, double sign_b);
};

GammaPoly gp_add(const GammaPoly& a, const GammaPoly& b);
GammaPoly gp_mul(const GammaPoly& a, const GammaPoly& b);
LeadingTerm leading(const GammaPoly& a);

// Text form "k*G^p + ...", highest exponent first, e.g. "2*G + 5.5".
std::string to_text(const GammaPoly& a);
// Parses the text form (also accepts "G", "-G^2", "1+2*G^2", scientific
// notation coefficients).  Throws std::invalid_argument on syntax errors or
// negative exponents.
GammaPoly parse_gamma_poly(const std::string& text);

}  // namespace tssa

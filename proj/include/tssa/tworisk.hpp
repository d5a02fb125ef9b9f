#pragma once

#include <array>
#include <vector>

#include "tssa/matrix.hpp"
#include "tssa/routh.hpp"

namespace tssa::model {

// Dimensional rates (1/time) for the two-risk-group SEIR model plus the two
// dimensionless fractions sigma (susceptibility factor of the protected
// class) and f (fraction of recruits entering unprotected).
struct DimParams {
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double mu = 0.0;
  double Psi = 0.0;
  double Omega = 0.0;
  double sigma = 1.0;
  double f = 1.0;

  void validate() const;  // throws std::invalid_argument
};

// Dimensionless parameters.  epsilon is the slow/fast rate ratio; b, m, rho
// are fast rates referred to gamma+delta+mu; psi, omega are slow rates
// referred to mu.  Derived quantities:
//   Sigma = psi + omega, kappa = sigma*b, h = b - kappa (so kappa + h == b
//   exactly), c = h(psi+f) - (1-kappa)(Sigma+1), R0 = (h(psi+f) +
//   kappa(Sigma+1)) / (Sigma+1), and sign(c) = sign(R0 - 1).
struct Params {
  double epsilon = 1e-3;
  double b = 0.0;
  double m = 0.0;
  double rho = 0.0;
  double psi = 0.0;
  double omega = 0.0;
  double sigma = 1.0;
  double f = 1.0;

  double Sigma = 0.0;
  double kappa = 0.0;
  double h = 0.0;
  double c = 0.0;
  double R0 = 0.0;

  static Params from_dimensionless(double epsilon, double b, double m, double rho,
                                   double psi, double omega, double sigma, double f);

  double Sigma_bar() const { return Sigma + 1.0; }
  double rho_bar() const { return rho + 1.0; }
  // The asymptotic verdicts are trusted for epsilon <= 0.1; larger values
  // are permitted but callers should warn.
  bool asymptotic_regime() const { return epsilon <= 0.1; }
};

Params nondimensionalize(const DimParams& d);

double r0(const Params& p);
double bifurcation_c(const Params& p);

// Rescaled state: X = E/epsilon, Y = I/epsilon; S, U, N are population
// fractions.  R is derived, never integrated.
struct State {
  double X = 0.0;
  double Y = 0.0;
  double S = 0.0;
  double U = 0.0;
  double N = 0.0;

  double recovered(double eps) const { return N - S - eps * X - eps * Y; }
};

State dfe(const Params& p);

// Numeric DFE verdict: eigenvalues of the exact rescaled-system Jacobian at
// the DFE with Gamma = 1/eps; stable iff max Re < 0 with margin 1e-8.
Verdict dfe_stability(const Params& p, double eps);

// G(z) = a2 z^2 + a1 z + a0 with a0 = -c; endemic equilibria are its
// admissible positive roots.
struct Quadratic {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double eval(double z) const { return (a2 * z + a1) * z + a0; }
  double max_abs_coeff() const;
};

Quadratic ede_quadratic(const Params& p);

// Leading-order endemic equilibrium in the ratio variables:
//   y = Y/N = z/b, s = S/N, u = U/N, p = s - u, q = sigma*s + (1-sigma)*u,
//   v = kappa*y, r = h*y, w = Sigma + z, 1/N = 1 + m*y.
struct EdeState {
  double z = 0.0;
  double y = 0.0;
  double s = 0.0;
  double u = 0.0;
  double p = 0.0;
  double q = 0.0;
  double v = 0.0;
  double r = 0.0;
  double w = 0.0;
  double N = 0.0;
};

// Admissibility bound z* <= (b-1)/(1-m), i.e. p >= 0.
double z_hat(const Params& p);

// All admissible endemic equilibria, ascending in z.  For c > 0 there is
// exactly one; for c <= 0 there may be zero, one or two (backward
// bifurcation).  A boundary slack of 1e-9 on z_hat admits the p = 0 case.
std::vector<EdeState> solve_ede(const Params& p);

// Expands a root z of G into the full EdeState.
EdeState ede_from_root(const Params& p, double z);

// Leading-order guess for finite-epsilon refinement.
State ede_to_state(const EdeState& e, const Params& p);

// The 5x5 Gamma-Jacobian at an endemic equilibrium, rows/cols ordered
// (X, Y, S, U, N), entries exact Gamma-polynomials.
SquareMatrix<GammaPoly> jacobian_gamma(const Params& p, const EdeState& e);

// Leading-order characteristic coefficients c_m = k_m Gamma^{p_m}:
//   k1 = rho+1, k2 = 1 + k1 + (rho+1)(v+1 + w+1), k3 = rho*y*A,
//   k5 = rho*y*B, k4 = k3 + k5, exponents (1, 1, 2, 2, 2).
// k/p hold the closed forms; k_minors/p_minors the principal-minors path
// through the Gamma-Jacobian; max_rel_dev is their worst disagreement.
struct LeadingCharPoly {
  std::array<double, 5> k{};
  std::array<int, 5> p{};
  std::array<double, 5> k_minors{};
  std::array<int, 5> p_minors{};
  double max_rel_dev = 0.0;
};

LeadingCharPoly leading_charpoly(const Params& p, const EdeState& e);

// The three leading-order stability conditions for the endemic equilibrium:
//   A = (kappa - m) + b*h*u
//   B = A + (kappa - m)*w + m*h*u*z + h*psi
//   C = rb*A + rb^2*(A*(v+1) + A*(w+1) - B) - rho*y*A^2,   rb = rho + 1
// along with k1..k5, q1 = k1 k2 - k3, q2 = k3 q1 - k1^2 k4 (ure rho*y*C = q2).
// margin_* are the conditions normalized by the magnitude sum of their own
// terms, so near-cancellations surface as small margins; verdict is the
// sign rule on A, B, C with margin = min of the three normalized margins.
struct StabilityConditions {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  std::array<double, 5> k{};
  double q1 = 0.0;
  double q2 = 0.0;
  double margin_A = 0.0;
  double margin_B = 0.0;
  double margin_C = 0.0;
  double margin = 0.0;
  Verdict verdict;
};

StabilityConditions stability_conditions(const Params& p, const EdeState& e);

// Necessity check for one parameter point: endemic equilibria with R0 <= 1
// require both m > kappa and m > 0.75.
struct Prop1Report {
  bool applicable = false;  // c <= 0
  int n_ede = 0;
  bool violated = false;  // EDE found although m <= kappa or m <= 0.75
};

Prop1Report check_prop1(const Params& p);

// Sufficiency check for one parameter point: per-EDE comparison of the
// asymptotic A/B/C verdict against numeric eigenvalues of the exact
// Jacobian at the Newton-refined equilibrium.
struct Prop4Entry {
  EdeState ede;
  StabilityConditions cond;
  double num_max_re = 0.0;
  bool numeric_ok = false;  // refinement and root finding converged
  bool agree = false;
};

struct Prop4Report {
  bool applicable = false;  // at least one EDE
  bool abc_all_positive = true;
  std::vector<Prop4Entry> entries;
};

Prop4Report check_prop4(const Params& p, double eps);

}  // namespace tssa::model

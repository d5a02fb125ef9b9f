#pragma once

#include <complex>
#include <vector>

#include "tssa/charpoly.hpp"
#include "tssa/tworisk.hpp"

namespace tssa::oracle {

// Roots of a polynomial with per-root residuals, evaluated on the
// root-scaled form of the polynomial so the acceptance bound is independent
// of coefficient magnitude.  converged=false flags results that stalled
// (clustered/multiple roots); callers exclude those from verdict
// comparisons.
struct RootSet {
  std::vector<std::complex<double>> roots;
  std::vector<double> residuals;
  double max_real = 0.0;
  bool converged = true;

  double max_residual() const;
};

// Aberth-Ehrlich simultaneous iteration.  Converges when every per-root
// correction drops below 1e-12 relative (absolute near zero), up to 200
// iterations.
RootSet poly_roots(const CharPoly<double>& p);

// Eigenvalues via the principal-minors characteristic polynomial followed by
// the root finder; n <= 8 keeps the conditioning acceptable.
RootSet eigvals(const SquareMatrix<double>& m);

// Right-hand side of the full rescaled system at finite epsilon, with the
// fast rows carrying their Gamma = 1/eps factor (the time-dynamics form).
std::array<double, 5> rescaled_rhs(const model::Params& p, double eps, const model::State& s);

// Exact Jacobian of the full rescaled system (time-dynamics form).
SquareMatrix<double> exact_jacobian(const model::Params& p, double eps, const model::State& s);

// Newton refinement of an equilibrium guess on the balanced equilibrium
// equations (fast rows divided by Gamma, which has the same zero set but
// keeps the 1e-12 residual target meaningful in double precision).
// Throws std::runtime_error after 50 iterations without convergence.
model::State newton_refine(const model::Params& p, double eps, const model::State& guess);

// Residual of the balanced equilibrium equations; the convergence measure
// used by newton_refine.
double equilibrium_residual(const model::Params& p, double eps, const model::State& s);

struct Trajectory {
  std::vector<double> times;
  std::vector<model::State> states;
  std::vector<double> recovered;  // co-integrated R, for the N = S+R+eX+eY check
  double eps = 0.0;
  double max_identity_defect = 0.0;

  const model::State& final_state() const { return states.back(); }
};

// Adaptive Dormand-Prince 5(4) integration of the full rescaled system with
// PI step control; R is co-integrated.  Steps producing populations below
// -1e-9 are rejected.  Requires eps >= 1e-6 (explicit stepping through the
// fast scale); throws std::runtime_error on step-size underflow.
Trajectory simulate(const model::Params& p, double eps, const model::State& init,
                    double t_end, double tol = 1e-8);

}  // namespace tssa::oracle

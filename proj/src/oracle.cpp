#include "tssa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tssa::oracle {

double RootSet::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

namespace {

// The simultaneous iteration runs in extended precision: the limiting
// accuracy near an m-fold root is (epsilon * sum|c_i|)^(1/m), so 80-bit
// arithmetic buys clustered eigenvalues (e.g. the DFE's repeated -1) an
// extra ~two digits over plain double.
using real_t = long double;
using cplx = std::complex<real_t>;

// Root-magnitude scale tau = max |c_i|^{1/i}; substituting lambda = tau*t
// brings the roots of the scaled polynomial to O(1) so residuals are
// meaningful independent of coefficient magnitude.
double root_scale(const CharPoly<double>& p) {
  double tau = 0.0;
  for (int i = 1; i <= p.degree(); ++i) {
    const double c = std::abs(p.c(i));
    if (c > 0.0) tau = std::max(tau, std::pow(c, 1.0 / i));
  }
  return (tau > 0.0) ? tau : 1.0;
}

}  // namespace

RootSet poly_roots(const CharPoly<double>& p) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("poly_roots: degree must be >= 1");

  RootSet out;
  const double tau = root_scale(p);
  // Scaled monic coefficients: c~_i = c_i / tau^i.
  std::vector<real_t> cs(static_cast<std::size_t>(n));
  real_t scale_pow = 1.0;
  for (int i = 1; i <= n; ++i) {
    scale_pow *= tau;
    cs[static_cast<std::size_t>(i - 1)] = static_cast<real_t>(p.c(i)) / scale_pow;
  }

  if (n == 1) {
    const std::complex<double> root(static_cast<double>(-cs[0]) * tau, 0.0);
    out.roots = {root};
    out.residuals = {0.0};
    out.max_real = root.real();
    return out;
  }

  real_t cmax = 1.0;
  for (real_t c : cs) cmax = std::max(cmax, std::abs(c));

  std::vector<cplx> z(static_cast<std::size_t>(n));
  const real_t r0 = 1.0 + cmax;
  for (int i = 0; i < n; ++i) {
    const real_t ang = 2.0L * static_cast<real_t>(M_PI) * (i + 0.35L) / n + 0.5L;
    z[static_cast<std::size_t>(i)] = 0.7L * r0 * cplx(std::cos(ang), std::sin(ang));
  }

  // Horner value, derivative, and the evaluation-error majorant
  // sum |c_i| |x|^{n-i}: once |p(x)| falls below machine epsilon times the
  // majorant the root cannot be improved further at this precision.
  auto eval_all = [&](cplx x, cplx& val, cplx& der, real_t& maj) {
    val = 1.0;
    der = 0.0;
    maj = 1.0;
    const real_t mag = std::abs(x);
    for (real_t c : cs) {
      der = der * x + val;
      val = val * x + c;
      maj = maj * mag + std::abs(c);
    }
  };

  constexpr real_t kNoiseFloor = 4.0L * std::numeric_limits<real_t>::epsilon();
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  out.converged = false;
  for (int iter = 0; iter < 200 && !out.converged; ++iter) {
    std::vector<cplx> znew = z;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      cplx val, der;
      real_t maj;
      eval_all(z[static_cast<std::size_t>(i)], val, der, maj);
      if (std::abs(val) <= kNoiseFloor * maj) {
        done[static_cast<std::size_t>(i)] = true;
        continue;
      }
      if (der == cplx(0.0L, 0.0L)) {
        znew[static_cast<std::size_t>(i)] += cplx(1e-6L, 1e-6L);
        continue;
      }
      const cplx newton = val / der;
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const cplx diff = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
        if (diff != cplx(0.0L, 0.0L)) sum += 1.0L / diff;
      }
      const cplx denom = 1.0L - newton * sum;
      const cplx step = (denom != cplx(0.0L, 0.0L)) ? newton / denom : newton;
      znew[static_cast<std::size_t>(i)] -= step;
      const real_t zmag = std::abs(znew[static_cast<std::size_t>(i)]);
      if (std::abs(step) <= 1e-12L * std::max(static_cast<real_t>(1.0), zmag))
        done[static_cast<std::size_t>(i)] = true;
    }
    z = znew;
    out.converged = true;
    for (int i = 0; i < n; ++i)
      if (!done[static_cast<std::size_t>(i)]) out.converged = false;
  }

  out.roots.resize(static_cast<std::size_t>(n));
  out.residuals.resize(static_cast<std::size_t>(n));
  out.max_real = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    cplx val, der;
    real_t maj;
    eval_all(z[static_cast<std::size_t>(i)], val, der, maj);
    out.residuals[static_cast<std::size_t>(i)] = static_cast<double>(std::abs(val));
    const std::complex<double> root(static_cast<double>(z[static_cast<std::size_t>(i)].real()) * tau,
                                    static_cast<double>(z[static_cast<std::size_t>(i)].imag()) * tau);
    out.roots[static_cast<std::size_t>(i)] = root;
    out.max_real = std::max(out.max_real, root.real());
  }
  return out;
}

RootSet eigvals(const SquareMatrix<double>& m) { return poly_roots(charpoly_minors(m)); }

namespace {

// Balanced equilibrium equations: the fast rows without their Gamma factor.
std::array<double, 5> balanced_rhs(const model::Params& p, double eps, const model::State& s) {
  const double q = (1.0 - p.sigma) * s.U + p.sigma * s.S;
  const double foi = p.b * q * s.Y / s.N;  // b Q Y / N
  return {
      -(p.rho + eps) * s.X + foi,
      p.rho * s.X - s.Y,
      1.0 - s.S - foi,
      p.f + p.psi * s.S - p.Sigma_bar() * s.U - p.b * s.U * s.Y / s.N,
      1.0 - s.N - p.m * s.Y,
  };
}

// Jacobian of the balanced equations.
std::array<std::array<double, 5>, 5> balanced_jacobian(const model::Params& p, double eps,
                                                       const model::State& s) {
  const double q = (1.0 - p.sigma) * s.U + p.sigma * s.S;
  const double yn = s.Y / s.N;
  const double bq_n = p.b * q / s.N;
  std::array<std::array<double, 5>, 5> j{};
  // Row X
  j[0] = {-(p.rho + eps), bq_n, p.sigma * p.b * yn, (1.0 - p.sigma) * p.b * yn,
          -bq_n * yn};
  // Row Y
  j[1] = {p.rho, -1.0, 0.0, 0.0, 0.0};
  // Row S
  j[2] = {0.0, -bq_n, -1.0 - p.sigma * p.b * yn, -(1.0 - p.sigma) * p.b * yn, bq_n * yn};
  // Row U
  j[3] = {0.0, -p.b * s.U / s.N, p.psi, -p.Sigma_bar() - p.b * yn, p.b * s.U * yn / s.N};
  // Row N
  j[4] = {0.0, -p.m, 0.0, 0.0, -1.0};
  return j;
}

// Solves a small dense linear system in place (partial pivoting).
bool solve_dense(std::array<std::array<double, 5>, 5> a, std::array<double, 5>& b) {
  constexpr int n = 5;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int k = r + 1; k < n; ++k) acc -= a[r][k] * b[k];
    b[r] = acc / a[r][r];
  }
  return true;
}

double max_abs(const std::array<double, 5>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::array<double, 5> rescaled_rhs(const model::Params& p, double eps, const model::State& s) {
  auto g = balanced_rhs(p, eps, s);
  const double gamma = 1.0 / eps;
  g[0] *= gamma;
  g[1] *= gamma;
  return g;
}

SquareMatrix<double> exact_jacobian(const model::Params& p, double eps, const model::State& s) {
  const auto j = balanced_jacobian(p, eps, s);
  SquareMatrix<double> out(5);
  const double gamma = 1.0 / eps;
  for (int r = 0; r < 5; ++r) {
    const double factor = (r < 2) ? gamma : 1.0;
    for (int c = 0; c < 5; ++c) out.at(r, c) = factor * j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return out;
}

double equilibrium_residual(const model::Params& p, double eps, const model::State& s) {
  return max_abs(balanced_rhs(p, eps, s));
}

model::State newton_refine(const model::Params& p, double eps, const model::State& guess) {
  model::State s = guess;
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 50;
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIter; ++iter) {
    auto g = balanced_rhs(p, eps, s);
    const double res = max_abs(g);
    if (!std::isfinite(res) || res > 1e6 * std::max(best, 1.0))
      throw std::runtime_error("newton_refine: diverged");
    if (res <= kTol) return s;
    best = std::min(best, res);
    for (double& v : g) v = -v;
    if (!solve_dense(balanced_jacobian(p, eps, s), g))
      throw std::runtime_error("newton_refine: singular Jacobian");
    s.X += g[0];
    s.Y += g[1];
    s.S += g[2];
    s.U += g[3];
    s.N += g[4];
    if (!(s.N > 0.0)) throw std::runtime_error("newton_refine: left the admissible region");
  }
  throw std::runtime_error("newton_refine: no convergence after 50 iterations");
}

namespace {

// Six-state dynamics vector (X, Y, S, U, N, R) for the integrator; R is
// co-integrated so the identity N = S + R + eps X + eps Y is checkable.
using Vec6 = std::array<double, 6>;

Vec6 dynamics(const model::Params& p, double eps, const Vec6& v) {
  model::State s{v[0], v[1], v[2], v[3], v[4]};
  const auto g = rescaled_rhs(p, eps, s);
  const double r_rate = (1.0 - p.m - eps) * v[1] - v[5];  // gamma/mu * I - R
  return {g[0], g[1], g[2], g[3], g[4], r_rate};
}

}  // namespace

Trajectory simulate(const model::Params& p, double eps, const model::State& init,
                    double t_end, double tol) {
  if (!(eps >= 1e-6)) throw std::invalid_argument("simulate: eps must be >= 1e-6");
  if (!(t_end >= 0.0)) throw std::invalid_argument("simulate: t_end must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("simulate: tol must be > 0");
  if (init.X < 0.0 || init.Y < 0.0 || init.S < 0.0 || init.U < 0.0 || init.N <= 0.0)
    throw std::invalid_argument("simulate: init must be nonnegative with N > 0");
  if (init.recovered(eps) < -1e-9)
    throw std::invalid_argument("simulate: init has negative derived R = N - S - eps(X+Y)");

  // Dormand-Prince 5(4) tableau.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  Trajectory traj;
  traj.eps = eps;

  Vec6 y{init.X, init.Y, init.S, init.U, init.N, init.recovered(eps)};
  double t = 0.0;

  auto record = [&](double time, const Vec6& v) {
    traj.times.push_back(time);
    traj.states.push_back(model::State{v[0], v[1], v[2], v[3], v[4]});
    traj.recovered.push_back(v[5]);
    const double defect = std::abs(v[4] - (v[2] + v[5] + eps * v[0] + eps * v[1]));
    traj.max_identity_defect = std::max(traj.max_identity_defect, defect);
  };
  record(t, y);
  if (t_end == 0.0) return traj;

  const double atol = 1e-12;
  double h = std::min({eps / 10.0, t_end, 1e-3});
  double err_prev = 1.0;
  Vec6 k1 = dynamics(p, eps, y);

  while (t < t_end) {
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("simulate: step size underflow (system too stiff for tolerance)");
    h = std::min(h, t_end - t);

    Vec6 y2, y3, y4, y5, y6, y7;
    for (int i = 0; i < 6; ++i) y2[i] = y[i] + h * a21 * k1[i];
    const Vec6 k2 = dynamics(p, eps, y2);
    for (int i = 0; i < 6; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec6 k3 = dynamics(p, eps, y3);
    for (int i = 0; i < 6; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec6 k4 = dynamics(p, eps, y4);
    for (int i = 0; i < 6; ++i)
      y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec6 k5 = dynamics(p, eps, y5);
    for (int i = 0; i < 6; ++i)
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const Vec6 k6 = dynamics(p, eps, y6);
    for (int i = 0; i < 6; ++i)
      y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const Vec6 k7 = dynamics(p, eps, y7);

    double err = 0.0;
    bool nonneg = true;
    for (int i = 0; i < 6; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = atol + tol * std::max(std::abs(y[i]), std::abs(y7[i]));
      err += (ei / sc) * (ei / sc);
      if (y7[i] < -1e-9) nonneg = false;
    }
    err = std::sqrt(err / 6.0);
    if (!std::isfinite(err)) nonneg = false;

    if (nonneg && err <= 1.0) {
      t += h;
      y = y7;
      k1 = k7;  // FSAL
      record(t, y);
      const double safe = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(safe, -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = safe;
    } else if (!nonneg) {
      h *= 0.5;
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h *= std::clamp(fac, 0.1, 0.9);
    }
  }
  return traj;
}

}  // namespace tssa::oracle

#include "tssa/tworisk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tssa/oracle.hpp"

namespace tssa::model {

void DimParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string("DimParams: ") + name + " must be >= 0");
  };
  nonneg(beta, "beta");
  nonneg(gamma, "gamma");
  nonneg(delta, "delta");
  nonneg(eta, "eta");
  nonneg(Psi, "Psi");
  nonneg(Omega, "Omega");
  if (!(mu > 0.0)) throw std::invalid_argument("DimParams: mu must be > 0");
  if (!(gamma + delta + mu > 0.0))
    throw std::invalid_argument("DimParams: gamma+delta+mu must be > 0");
  if (!(sigma >= 0.0 && sigma <= 1.0))
    throw std::invalid_argument("DimParams: sigma must be in [0, 1]");
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("DimParams: f must be in [0, 1]");
}

Params Params::from_dimensionless(double epsilon, double b, double m, double rho,
                                  double psi, double omega, double sigma, double f) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("Params: epsilon must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("Params: b must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("Params: rho must be > 0");
  if (!(m >= 0.0 && m < 1.0)) throw std::invalid_argument("Params: m must be in [0, 1)");
  if (!(sigma > 0.0 && sigma <= 1.0))
    throw std::invalid_argument("Params: sigma must be in (0, 1]");
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("Params: f must be in [0, 1]");
  if (!(psi >= 0.0)) throw std::invalid_argument("Params: psi must be >= 0");
  if (!(omega >= 0.0)) throw std::invalid_argument("Params: omega must be >= 0");

  Params p;
  p.epsilon = epsilon;
  p.b = b;
  p.m = m;
  p.rho = rho;
  p.psi = psi;
  p.omega = omega;
  p.sigma = sigma;
  p.f = f;
  p.Sigma = psi + omega;
  // Split b into kappa + h exactly: the subtraction against the larger half
  // is exact (Sterbenz), so the invariant kappa + h == b holds bitwise.
  p.kappa = sigma * b;
  p.h = b - p.kappa;
  if (p.kappa < 0.5 * b) p.kappa = b - p.h;
  const double sbar = p.Sigma + 1.0;
  p.c = p.h * (psi + f) - (1.0 - p.kappa) * sbar;
  p.R0 = (p.h * (psi + f) + p.kappa * sbar) / sbar;
  return p;
}

Params nondimensionalize(const DimParams& d) {
  d.validate();
  const double fast = d.gamma + d.delta + d.mu;
  return Params::from_dimensionless(d.mu / fast, d.beta / fast, d.delta / fast,
                                    d.eta / fast, d.Psi / d.mu, d.Omega / d.mu, d.sigma,
                                    d.f);
}

double r0(const Params& p) { return p.R0; }
double bifurcation_c(const Params& p) { return p.c; }

State dfe(const Params& p) {
  State s;
  s.X = 0.0;
  s.Y = 0.0;
  s.S = 1.0;
  s.U = (p.psi + p.f) / p.Sigma_bar();
  s.N = 1.0;
  return s;
}

Verdict dfe_stability(const Params& p, double eps) {
  const auto rs = oracle::eigvals(oracle::exact_jacobian(p, eps, dfe(p)));
  Verdict v;
  v.margin = -rs.max_real;
  if (!rs.converged) {
    v.state = Stability::Indeterminate;
    return v;
  }
  const double thr = 1e-8;
  if (rs.max_real < -thr)
    v.state = Stability::Stable;
  else if (rs.max_real > thr)
    v.state = Stability::Unstable;
  else
    v.state = Stability::Indeterminate;
  return v;
}

double Quadratic::max_abs_coeff() const {
  return std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
}

Quadratic ede_quadratic(const Params& p) {
  Quadratic g;
  const double one_m = 1.0 - p.m;
  g.a2 = one_m * p.sigma;
  g.a1 = (1.0 - p.kappa) + one_m * p.sigma * p.Sigma_bar() +
         one_m * (1.0 - p.sigma) * p.psi - (1.0 - p.sigma) * p.m * p.f;
  g.a0 = (1.0 - p.kappa) * p.Sigma_bar() - p.h * (p.psi + p.f);  // == -c
  return g;
}

double z_hat(const Params& p) { return (p.b - 1.0) / (1.0 - p.m); }

EdeState ede_from_root(const Params& p, double z) {
  EdeState e;
  e.z = z;
  e.y = z / p.b;
  const double n_inv = 1.0 + p.m * e.y;
  e.N = 1.0 / n_inv;
  e.s = 1.0 - (1.0 - p.m) * e.y;
  // U-equation (Sigma_bar + z) u = psi s + f/N; valid for every sigma,
  // including h = 0 where the hu identity degenerates.
  e.u = (p.psi * e.s + p.f * n_inv) / (p.Sigma_bar() + z);
  e.p = e.s - e.u;
  e.q = p.sigma * e.s + (1.0 - p.sigma) * e.u;
  e.v = p.kappa * e.y;
  e.r = p.h * e.y;
  e.w = p.Sigma + z;
  return e;
}

std::vector<EdeState> solve_ede(const Params& p) {
  const Quadratic g = ede_quadratic(p);
  const double disc = g.a1 * g.a1 - 4.0 * g.a2 * g.a0;
  if (disc < 0.0) return {};
  const double sq = std::sqrt(disc);
  // Numerically stable root pair for a2 > 0 (sigma > 0, m < 1).
  double z1, z2;
  if (g.a1 >= 0.0) {
    const double t = -0.5 * (g.a1 + sq);
    z1 = t / g.a2;
    z2 = (t != 0.0) ? g.a0 / t : 0.0;
  } else {
    const double t = -0.5 * (g.a1 - sq);
    z1 = t / g.a2;
    z2 = (t != 0.0) ? g.a0 / t : 0.0;
  }
  std::vector<double> roots;
  const double bound = z_hat(p) + 1e-9;  // boundary slack admits p = 0
  for (double z : {z1, z2})
    if (z > 0.0 && z <= bound) roots.push_back(z);
  std::sort(roots.begin(), roots.end());
  if (roots.size() == 2 && roots[0] == roots[1]) roots.pop_back();

  std::vector<EdeState> out;
  out.reserve(roots.size());
  for (double z : roots) out.push_back(ede_from_root(p, z));
  return out;
}

State ede_to_state(const EdeState& e, const Params& p) {
  State s;
  s.N = e.N;
  s.Y = e.y * e.N;
  s.X = s.Y / p.rho;
  s.S = e.s * e.N;
  s.U = e.u * e.N;
  return s;
}

SquareMatrix<GammaPoly> jacobian_gamma(const Params& p, const EdeState& e) {
  SquareMatrix<GammaPoly> j(5);
  const auto G = [](double k) { return GammaPoly::term(k, 1); };

  j.at(0, 0) = G(-p.rho) + GammaPoly(-1.0);  // -(rho*Gamma + 1)
  j.at(0, 1) = G(1.0);
  j.at(0, 2) = G(e.v);
  j.at(0, 3) = G(e.r);
  j.at(0, 4) = G(-e.y);

  j.at(1, 0) = G(p.rho);
  j.at(1, 1) = G(-1.0);

  j.at(2, 1) = GammaPoly(-1.0);
  j.at(2, 2) = GammaPoly(-(1.0 + e.v));
  j.at(2, 3) = GammaPoly(-e.r);
  j.at(2, 4) = GammaPoly(e.y);

  j.at(3, 1) = GammaPoly(-p.b * e.u);
  j.at(3, 2) = GammaPoly(p.psi);
  j.at(3, 3) = GammaPoly(-(1.0 + e.w));
  j.at(3, 4) = GammaPoly(e.u * e.z);

  j.at(4, 1) = GammaPoly(-p.m);
  j.at(4, 4) = GammaPoly(-1.0);
  return j;
}

namespace {

// A, B and the magnitude sums of their terms (for normalized margins).
struct AbTerms {
  double A, B, scale_A, scale_B;
};

AbTerms ab_terms(const Params& p, const EdeState& e) {
  AbTerms t{};
  const double km = p.kappa - p.m;
  const double bhu = p.b * p.h * e.u;
  t.A = km + bhu;
  t.scale_A = std::abs(km) + std::abs(bhu);
  const double t_w = km * e.w;
  const double t_muz = p.m * p.h * e.u * e.z;
  const double t_psi = p.h * p.psi;
  t.B = t.A + t_w + t_muz + t_psi;
  t.scale_B = std::abs(t.A) + std::abs(t_w) + std::abs(t_muz) + std::abs(t_psi);
  return t;
}

double safe_ratio(double value, double scale) {
  return value / std::max(scale, 1e-30);
}

}  // namespace

StabilityConditions stability_conditions(const Params& p, const EdeState& e) {
  StabilityConditions sc;
  const AbTerms t = ab_terms(p, e);
  sc.A = t.A;
  sc.B = t.B;

  const double rb = p.rho_bar();
  const double vbar = 1.0 + e.v;
  const double wbar = 1.0 + e.w;
  const double ry = p.rho * e.y;
  const double inner = sc.A * vbar + sc.A * wbar - sc.B;
  sc.C = rb * sc.A + rb * rb * inner - ry * sc.A * sc.A;
  const double scale_C = rb * std::abs(sc.A) +
                         rb * rb * (std::abs(sc.A) * vbar + std::abs(sc.A) * wbar + std::abs(sc.B)) +
                         ry * sc.A * sc.A;

  sc.k[0] = rb;
  sc.k[1] = 1.0 + rb + rb * (vbar + wbar);
  sc.k[2] = ry * sc.A;
  sc.k[4] = ry * sc.B;
  sc.k[3] = sc.k[2] + sc.k[4];
  sc.q1 = sc.k[0] * sc.k[1] - sc.k[2];
  sc.q2 = sc.k[2] * sc.q1 - sc.k[0] * sc.k[0] * sc.k[3];

  sc.margin_A = safe_ratio(sc.A, t.scale_A);
  sc.margin_B = safe_ratio(sc.B, t.scale_B);
  sc.margin_C = safe_ratio(sc.C, scale_C);
  sc.margin = std::min({sc.margin_A, sc.margin_B, sc.margin_C});

  const double thr = 1e-9;
  sc.verdict.margin = sc.margin;
  if (sc.margin_A < -thr || sc.margin_B < -thr || sc.margin_C < -thr)
    sc.verdict.state = Stability::Unstable;
  else if (sc.margin <= thr)
    sc.verdict.state = Stability::Indeterminate;
  else
    sc.verdict.state = Stability::Stable;
  return sc;
}

LeadingCharPoly leading_charpoly(const Params& p, const EdeState& e) {
  LeadingCharPoly lc;
  const StabilityConditions sc = stability_conditions(p, e);
  lc.k = sc.k;
  lc.p = {1, 1, 2, 2, 2};

  const auto cp = charpoly_minors(jacobian_gamma(p, e));
  double dev = 0.0;
  for (int i = 0; i < 5; ++i) {
    const LeadingTerm lt = cp.coeffs[static_cast<std::size_t>(i)].leading();
    lc.k_minors[static_cast<std::size_t>(i)] = lt.k;
    lc.p_minors[static_cast<std::size_t>(i)] = lt.p;
    const double kc = lc.k[static_cast<std::size_t>(i)];
    if (lt.p != lc.p[static_cast<std::size_t>(i)]) {
      dev = std::numeric_limits<double>::infinity();
    } else {
      dev = std::max(dev, std::abs(lt.k - kc) / std::max(std::abs(kc), 1e-300));
    }
  }
  lc.max_rel_dev = dev;
  return lc;
}

Prop1Report check_prop1(const Params& p) {
  Prop1Report rep;
  rep.applicable = (p.c <= 0.0);
  if (!rep.applicable) return rep;
  const auto edes = solve_ede(p);
  rep.n_ede = static_cast<int>(edes.size());
  if (rep.n_ede > 0 && (p.m <= p.kappa || p.m <= 0.75)) rep.violated = true;
  return rep;
}

Prop4Report check_prop4(const Params& p, double eps) {
  Prop4Report rep;
  const auto edes = solve_ede(p);
  rep.applicable = !edes.empty();
  for (const EdeState& e : edes) {
    Prop4Entry entry;
    entry.ede = e;
    entry.cond = stability_conditions(p, e);
    if (entry.cond.margin <= 0.0) rep.abc_all_positive = false;
    try {
      const State refined = oracle::newton_refine(p, eps, ede_to_state(e, p));
      const auto rs = oracle::eigvals(oracle::exact_jacobian(p, eps, refined));
      entry.num_max_re = rs.max_real;
      entry.numeric_ok = rs.converged;
      const bool num_stable = rs.max_real < 0.0;
      entry.agree = entry.numeric_ok && (num_stable == entry.cond.verdict.stable()) &&
                    entry.cond.verdict.state != Stability::Indeterminate;
    } catch (const std::exception&) {
      entry.numeric_ok = false;
      entry.agree = false;
    }
    rep.entries.push_back(entry);
  }
  return rep;
}

}  // namespace tssa::model

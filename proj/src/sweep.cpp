#include "tssa/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace tssa::sweep {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

model::Params sample_params(const Ranges& r, SplitMix64& rng) {
  const double b = rng.log_uniform(r.b_lo, r.b_hi);
  const double sigma = rng.uniform_open(r.sigma_lo, r.sigma_hi);
  const double m = rng.uniform(r.m_lo, r.m_hi);
  const double rho = rng.log_uniform(r.rho_lo, r.rho_hi);
  const double psi = rng.uniform(r.psi_lo, r.psi_hi);
  const double omega = rng.uniform(r.omega_lo, r.omega_hi);
  const double f = rng.uniform(r.f_lo, r.f_hi);
  return model::Params::from_dimensionless(r.epsilon, b, m, rho, psi, omega, sigma, f);
}

bool PointAnalysis::any_indeterminate() const {
  if (dfe_asym == Stability::Indeterminate) return true;
  if (dfe_numeric.state == Stability::Indeterminate) return true;
  for (const auto& e : edes)
    if (e.cond.verdict.state == Stability::Indeterminate) return true;
  return false;
}

PointAnalysis analyze_point(const model::Params& p) {
  PointAnalysis out;
  out.params = p;
  out.dfe_state = model::dfe(p);

  // Asymptotic DFE verdict: the sign of c, normalized by its term magnitudes.
  const double c_scale = std::abs(p.h * (p.psi + p.f)) +
                         std::abs((1.0 - p.kappa) * p.Sigma_bar());
  out.dfe_asym_margin = -p.c / std::max(c_scale, 1e-30);
  const double thr = 1e-9;
  if (out.dfe_asym_margin > thr)
    out.dfe_asym = Stability::Stable;
  else if (out.dfe_asym_margin < -thr)
    out.dfe_asym = Stability::Unstable;
  else
    out.dfe_asym = Stability::Indeterminate;

  out.dfe_numeric = model::dfe_stability(p, p.epsilon);

  for (const auto& e : model::solve_ede(p))
    out.edes.push_back(EdeAnalysis{e, model::stability_conditions(p, e)});
  return out;
}

SampleRecord analyze_sample(std::uint64_t index, const model::Params& p, bool numeric,
                            double eps) {
  SampleRecord rec;
  rec.index = index;
  rec.params = p;
  try {
    const auto edes = model::solve_ede(p);
    rec.n_ede = static_cast<int>(edes.size());
    if (!edes.empty()) {
      rec.have_ede = true;
      // Report the worst-margin equilibrium so "no row with min(A,B,C) <= 0"
      // statements read directly off the CSV.
      std::size_t worst = 0;
      double worst_margin = std::numeric_limits<double>::infinity();
      std::vector<model::StabilityConditions> conds;
      conds.reserve(edes.size());
      for (std::size_t i = 0; i < edes.size(); ++i) {
        conds.push_back(model::stability_conditions(p, edes[i]));
        if (conds[i].margin < worst_margin) {
          worst_margin = conds[i].margin;
          worst = i;
        }
      }
      rec.ede = edes[worst];
      rec.cond = conds[worst];
      if (numeric) {
        rec.numeric_ran = true;
        try {
          const auto refined = oracle::newton_refine(p, eps, model::ede_to_state(rec.ede, p));
          const auto rs = oracle::eigvals(oracle::exact_jacobian(p, eps, refined));
          rec.numeric_ok = rs.converged;
          rec.num_max_re = rs.max_real;
          rec.agree = rec.numeric_ok &&
                      rec.cond.verdict.state != Stability::Indeterminate &&
                      ((rs.max_real < 0.0) == rec.cond.verdict.stable());
        } catch (const std::exception&) {
          rec.numeric_ok = false;
          rec.status = "newton_failed";
        }
      }
    } else {
      rec.status = "no_ede";
    }
  } catch (const std::exception&) {
    rec.status = "error";
  }
  return rec;
}

void write_csv_header(std::ostream& os) {
  os << "index,b,sigma,m,rho,psi,omega,f,epsilon,R0,c,n_ede,z,A,B,C,margin,"
        "k1,k2,k3,k4,k5,q1,q2,asym_verdict,num_max_re,agree,status\n";
}

void write_csv_row(std::ostream& os, const SampleRecord& r) {
  const auto& p = r.params;
  os << r.index << ',' << format_double(p.b) << ',' << format_double(p.sigma) << ','
     << format_double(p.m) << ',' << format_double(p.rho) << ',' << format_double(p.psi)
     << ',' << format_double(p.omega) << ',' << format_double(p.f) << ','
     << format_double(p.epsilon) << ',' << format_double(p.R0) << ','
     << format_double(p.c) << ',' << r.n_ede << ',';
  if (r.have_ede) {
    os << format_double(r.ede.z) << ',' << format_double(r.cond.A) << ','
       << format_double(r.cond.B) << ',' << format_double(r.cond.C) << ','
       << format_double(r.cond.margin) << ',';
    for (int i = 0; i < 5; ++i) os << format_double(r.cond.k[static_cast<std::size_t>(i)]) << ',';
    os << format_double(r.cond.q1) << ',' << format_double(r.cond.q2) << ','
       << to_string(r.cond.verdict.state) << ',';
    if (r.numeric_ran && r.numeric_ok)
      os << format_double(r.num_max_re) << ',' << (r.agree ? "yes" : "no");
    else
      os << ',';
  } else {
    os << ",,,,,,,,,,,,,,";
  }
  os << ',' << r.status << '\n';
}

void run_sweep(const SweepConfig& cfg, std::ostream& os) {
  std::vector<SampleRecord> records(cfg.samples);
  const int jobs = std::max(1, cfg.jobs);

  auto work = [&](std::atomic<std::uint64_t>& counter) {
    for (std::uint64_t i = counter.fetch_add(1); i < cfg.samples; i = counter.fetch_add(1)) {
      SplitMix64 rng = stream_rng(cfg.seed, i);
      const auto p = sample_params(cfg.ranges, rng);
      records[i] = analyze_sample(i, p, cfg.numeric, cfg.ranges.epsilon);
    }
  };

  std::atomic<std::uint64_t> counter{0};
  if (jobs == 1) {
    work(counter);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back([&] { work(counter); });
    for (auto& th : pool) th.join();
  }

  write_csv_header(os);
  for (const auto& rec : records) write_csv_row(os, rec);
}

std::vector<VerifyRow> verify_point(const model::Params& p,
                                    const std::vector<double>& eps_list) {
  std::vector<VerifyRow> rows;
  const PointAnalysis base = analyze_point(p);
  for (double eps : eps_list) {
    {
      VerifyRow row;
      row.eps = eps;
      row.equilibrium = -1;
      row.asym = base.dfe_asym;
      row.asym_margin = base.dfe_asym_margin;
      const Verdict num = model::dfe_stability(p, eps);
      row.oracle_ok = true;
      row.num_max_re = -num.margin;
      row.agree = row.asym != Stability::Indeterminate &&
                  ((row.num_max_re < 0.0) == (row.asym == Stability::Stable));
      row.near_margin = std::abs(row.asym_margin) < 0.05;
      rows.push_back(row);
    }
    for (std::size_t i = 0; i < base.edes.size(); ++i) {
      VerifyRow row;
      row.eps = eps;
      row.equilibrium = static_cast<int>(i);
      row.asym = base.edes[i].cond.verdict.state;
      row.asym_margin = base.edes[i].cond.margin;
      row.near_margin = std::abs(row.asym_margin) < 0.05;
      try {
        const auto refined =
            oracle::newton_refine(p, eps, model::ede_to_state(base.edes[i].ede, p));
        const auto rs = oracle::eigvals(oracle::exact_jacobian(p, eps, refined));
        row.oracle_ok = rs.converged;
        row.num_max_re = rs.max_real;
        row.agree = row.oracle_ok && row.asym != Stability::Indeterminate &&
                    ((rs.max_real < 0.0) == (row.asym == Stability::Stable));
      } catch (const std::exception&) {
        row.oracle_ok = false;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::optional<BifurcationInstance> find_backward_bifurcation(double rho) {
  // The necessary region is m > 1 - kappa + kappa^2 (so m > 0.75, m > kappa);
  // scan m near 1, kappa near 1/2, with f = 1, psi = 0 and omega chosen to
  // put c just below zero.
  for (double m : {0.96, 0.97, 0.98}) {
    for (double kappa : {0.40, 0.45, 0.50, 0.55}) {
      for (double b : {1.1, 1.2, 1.3, 1.5}) {
        const double sigma = kappa / b;
        if (!(sigma > 0.0 && sigma < 1.0)) continue;
        const double h = b - sigma * b;
        for (double c_target : {3e-2, 1e-2, 1e-3}) {
          // c = h f - (1-kappa)(omega+1) with f = 1, psi = 0.
          const double omega = (h + c_target) / (1.0 - kappa) - 1.0;
          if (!(omega >= 0.0)) continue;
          model::Params p;
          try {
            p = model::Params::from_dimensionless(1e-3, b, m, rho, 0.0, omega, sigma, 1.0);
          } catch (const std::exception&) {
            continue;
          }
          if (!(p.c <= 0.0) || !(p.m > p.kappa)) continue;
          auto edes = model::solve_ede(p);
          // A branch too close to the DFE cannot be tracked at finite eps;
          // keep instances whose lower root is comfortably interior.
          if (edes.size() == 2 && edes[0].z >= 0.05)
            return BifurcationInstance{p, std::move(edes)};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace tssa::sweep

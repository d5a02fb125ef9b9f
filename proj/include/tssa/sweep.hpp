#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tssa/oracle.hpp"
#include "tssa/rng.hpp"
#include "tssa/tworisk.hpp"

namespace tssa::sweep {

// Sampling ranges for parameter sweeps.  b and rho are drawn log-uniformly
// (they span decades); sigma on the open unit interval; the rest uniformly.
struct Ranges {
  double b_lo = 1.1, b_hi = 20.0;
  double sigma_lo = 0.0, sigma_hi = 1.0;
  double m_lo = 0.0, m_hi = 0.75;
  double rho_lo = 0.1, rho_hi = 10.0;
  double psi_lo = 0.0, psi_hi = 10.0;
  double omega_lo = 0.0, omega_hi = 10.0;
  double f_lo = 0.0, f_hi = 1.0;
  double epsilon = 1e-3;
};

model::Params sample_params(const Ranges& r, SplitMix64& rng);

// Full single-point analysis: R0, c, DFE verdicts, every admissible EDE with
// its stability conditions.
struct EdeAnalysis {
  model::EdeState ede;
  model::StabilityConditions cond;
};

struct PointAnalysis {
  model::Params params;
  model::State dfe_state;
  Stability dfe_asym = Stability::Indeterminate;  // sign of c
  double dfe_asym_margin = 0.0;                   // normalized -c
  Verdict dfe_numeric;
  std::vector<EdeAnalysis> edes;

  bool any_indeterminate() const;
};

PointAnalysis analyze_point(const model::Params& p);

// One sweep sample.  When the sample has endemic equilibria, `cond` and
// `ede` describe the worst-margin one; `agree` compares its asymptotic
// verdict with numeric eigenvalues at the configured epsilon.
struct SampleRecord {
  std::uint64_t index = 0;
  model::Params params;
  int n_ede = 0;
  bool have_ede = false;
  model::EdeState ede;
  model::StabilityConditions cond;
  bool numeric_ran = false;
  bool numeric_ok = false;
  double num_max_re = 0.0;
  bool agree = false;
  std::string status = "ok";
};

SampleRecord analyze_sample(std::uint64_t index, const model::Params& p, bool numeric,
                            double eps);

struct SweepConfig {
  std::uint64_t samples = 1000;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool numeric = true;
  Ranges ranges;
};

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const SampleRecord& r);

// Runs the sweep with a stateless worker pool; output is ordered by sample
// index and byte-identical for a fixed seed regardless of `jobs`.
void run_sweep(const SweepConfig& cfg, std::ostream& os);

// Asymptotic-vs-exact comparison rows for one parameter point across a list
// of epsilon values.  equilibrium = -1 is the DFE, otherwise an EDE index.
struct VerifyRow {
  double eps = 0.0;
  int equilibrium = -1;
  Stability asym = Stability::Indeterminate;
  double asym_margin = 0.0;
  bool oracle_ok = false;
  double num_max_re = 0.0;
  bool agree = false;
  bool near_margin = false;  // |asym margin| < 0.05
};

std::vector<VerifyRow> verify_point(const model::Params& p, const std::vector<double>& eps_list);

// Deterministic grid search for a backward-bifurcation instance (two
// admissible endemic equilibria with c <= 0) in the region m > 0.75,
// m > kappa.
struct BifurcationInstance {
  model::Params params;
  std::vector<model::EdeState> edes;
};

std::optional<BifurcationInstance> find_backward_bifurcation(double rho = 1.0);

// Formats a double as the shortest round-trippable decimal (%.17g); all CSV
// and JSON numbers go through this for reproducibility.
std::string format_double(double v);

}  // namespace tssa::sweep

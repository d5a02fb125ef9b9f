#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tssa/json_io.hpp"
#include "tssa/oracle.hpp"
#include "tssa/sweep.hpp"

namespace {

using nlohmann::json;
using namespace tssa;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitIntegratorFailure = 2;
constexpr int kExitIndeterminate = 3;

void emit_error(const std::string& message) {
  std::cerr << json{{"error", message}}.dump() << "\n";
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << content;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !(v > 0.0))
      throw std::invalid_argument("bad epsilon value: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty epsilon list");
  return out;
}

void warn_outside_regime(double eps) {
  if (eps > 0.1)
    std::cerr << "warning: eps = " << sweep::format_double(eps)
              << " is outside the asymptotic regime (eps <= 0.1); "
                 "leading-order verdicts may be unreliable\n";
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TSSA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable TSSA_SEED='" << env << "'\n";
    }
  }
  return 42;
}

int cmd_charpoly(const std::string& matrix_path, const std::string& out_path) {
  const auto input = io::parse_matrix_json(load_json_file(matrix_path));
  json result;
  if (std::holds_alternative<SquareMatrix<double>>(input)) {
    const auto& m = std::get<SquareMatrix<double>>(input);
    const auto cp = charpoly_minors(m);
    result["n"] = cp.degree();
    result["coeffs"] = cp.coeffs;
  } else {
    const auto& m = std::get<SquareMatrix<GammaPoly>>(input);
    const auto cp = charpoly_minors(m);
    result["n"] = cp.degree();
    json coeffs = json::array(), leads = json::array();
    for (const auto& c : cp.coeffs) {
      coeffs.push_back(to_text(c));
      const auto lt = c.leading();
      leads.push_back(json{{"k", lt.k}, {"p", lt.p}});
    }
    result["coeffs"] = coeffs;
    result["leading"] = leads;
  }
  write_output(out_path, result.dump(2) + "\n");
  return kExitOk;
}

template <class S>
json routh_report(const CharPoly<S>& cp);

template <>
json routh_report(const CharPoly<double>& cp) {
  const auto arr = build_routh(cp);
  json rows = json::array();
  for (const auto& row : arr.rows) rows.push_back(row);
  json out{{"degree", arr.degree},
           {"rows", rows},
           {"first_column", arr.first_column},
           {"zero_pivot", arr.zero_pivot},
           {"verdict", io::verdict_to_json(verdict(arr))}};
  if (cp.degree() == 4) {
    const auto rh = rh_conditions_deg4(cp);
    out["q"] = json{{"c1", rh.c1}, {"c4", rh.c4}, {"q1", rh.q1}, {"q2", rh.q2}};
  } else if (cp.degree() == 5) {
    const auto q = rh_quantities_deg5(cp);
    out["q"] = json{{"q1", q.q1}, {"q2", q.q2}, {"q3", q.q3}, {"q4", q.q4},
                    {"q4_full", q4_full(cp)}};
  }
  return out;
}

template <>
json routh_report(const CharPoly<GammaPoly>& cp) {
  const auto arr = build_routh(cp);
  json rows = json::array();
  for (const auto& row : arr.rows) {
    json r = json::array();
    for (const auto& e : row) r.push_back(to_text(e));
    rows.push_back(r);
  }
  json first = json::array(), leads = json::array();
  for (const auto& e : arr.first_column) {
    first.push_back(to_text(e));
    const auto lt = e.leading();
    leads.push_back(json{{"k", lt.k}, {"p", lt.p}});
  }
  return json{{"degree", arr.degree},
              {"rows", rows},
              {"first_column", first},
              {"first_column_leading", leads},
              {"zero_pivot", arr.zero_pivot},
              {"verdict", io::verdict_to_json(verdict_leading(arr))}};
}

int cmd_routh(const std::string& coeffs_text, const std::string& out_path) {
  std::vector<std::string> tokens;
  std::stringstream ss(coeffs_text);
  std::string tok;
  while (std::getline(ss, tok, ',')) tokens.push_back(tok);
  if (tokens.size() < 3)
    throw std::invalid_argument("--coeffs needs at least '1,c1,c2' (degree >= 2)");

  bool gamma = false;
  for (const auto& t : tokens)
    if (t.find('G') != std::string::npos || t.find('g') != std::string::npos) gamma = true;

  json result;
  if (gamma) {
    std::vector<GammaPoly> cs;
    for (const auto& t : tokens) cs.push_back(parse_gamma_poly(t));
    const auto lead = cs.front().leading();
    if (!(lead.p == 0 && lead.k == 1.0 && cs.front().term_count() == 1))
      throw std::invalid_argument("--coeffs must start with the leading 1");
    cs.erase(cs.begin());
    result = routh_report(CharPoly<GammaPoly>{std::move(cs)});
  } else {
    std::vector<double> cs;
    for (const auto& t : tokens) {
      std::size_t used = 0;
      cs.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument("bad coefficient: '" + t + "'");
    }
    if (cs.front() != 1.0) throw std::invalid_argument("--coeffs must start with the leading 1");
    cs.erase(cs.begin());
    result = routh_report(CharPoly<double>{std::move(cs)});
  }
  write_output(out_path, result.dump(2) + "\n");
  return kExitOk;
}

int cmd_analyze(const std::string& params_path, const std::string& out_path) {
  const auto p = io::load_params_file(params_path);
  warn_outside_regime(p.epsilon);
  const auto analysis = sweep::analyze_point(p);
  write_output(out_path, io::report_to_json(analysis).dump(2) + "\n");
  return analysis.any_indeterminate() ? kExitIndeterminate : kExitOk;
}

int cmd_verify(const std::string& params_path, const std::string& eps_text,
               const std::string& out_path, const std::string& format) {
  const auto p = io::load_params_file(params_path);
  const auto eps_list = parse_eps_list(eps_text);
  for (double eps : eps_list) warn_outside_regime(eps);
  const auto rows = sweep::verify_point(p, eps_list);
  if (format == "csv") {
    std::ostringstream os;
    os << "eps,equilibrium,asymptotic,asym_margin,oracle_ok,num_max_re,agree,near_margin\n";
    for (const auto& r : rows) {
      os << sweep::format_double(r.eps) << ','
         << (r.equilibrium < 0 ? std::string("DFE") : "EDE[" + std::to_string(r.equilibrium) + "]")
         << ',' << to_string(r.asym) << ',' << sweep::format_double(r.asym_margin) << ','
         << (r.oracle_ok ? "yes" : "no") << ','
         << (r.oracle_ok ? sweep::format_double(r.num_max_re) : std::string()) << ','
         << (r.agree ? "yes" : "no") << ',' << (r.near_margin ? "yes" : "no") << '\n';
    }
    write_output(out_path, os.str());
  } else {
    write_output(out_path, io::verify_rows_to_json(rows).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::uint64_t seed, bool seed_given, int jobs,
              bool jobs_given, const std::string& out_path) {
  const json config_json = load_json_file(config_path);
  auto cfg = io::parse_sweep_config(config_json);
  // Precedence: --seed, then the config file, then TSSA_SEED / 42.
  if (seed_given || !config_json.contains("seed")) cfg.seed = seed;
  if (jobs_given) cfg.jobs = jobs;
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  std::ostringstream os;
  sweep::run_sweep(cfg, os);
  write_output(out_path, os.str());
  return kExitOk;
}

int cmd_simulate(const std::string& params_path, double eps, double t_end,
                 const std::string& init_path, const std::string& out_path,
                 const std::string& summary_path) {
  const auto p = io::load_params_file(params_path);
  warn_outside_regime(eps);

  model::State init;
  if (init_path.empty()) {
    // Near-DFE seed: one rescaled infectious unit (I = eps), moved out of
    // the susceptible class so N = S + R + eps X + eps Y still holds.
    init = model::dfe(p);
    init.Y = 1.0;
    init.S = 1.0 - eps * init.Y;
    init.U = std::min(init.U, init.S);
  } else {
    init = io::parse_state_json(load_json_file(init_path));
  }

  oracle::Trajectory traj;
  try {
    traj = oracle::simulate(p, eps, init, t_end);
  } catch (const std::runtime_error& e) {
    emit_error(e.what());
    return kExitIntegratorFailure;
  }

  std::ostringstream os;
  os << "t,X,Y,S,U,N\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    os << sweep::format_double(traj.times[i]) << ',' << sweep::format_double(s.X) << ','
       << sweep::format_double(s.Y) << ',' << sweep::format_double(s.S) << ','
       << sweep::format_double(s.U) << ',' << sweep::format_double(s.N) << '\n';
  }
  write_output(out_path, os.str());

  // Endemic-phase summary: tail average over the last 20% of the time span.
  double tail_start = traj.times.back() - 0.2 * (traj.times.back() - traj.times.front());
  double frac_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < tail_start) continue;
    frac_sum += eps * traj.states[i].Y / traj.states[i].N;
    ++count;
  }
  const double endemic_fraction = (count > 0) ? frac_sum / count : 0.0;
  const auto& fs = traj.final_state();
  json summary{{"eps", eps},
               {"t_end", t_end},
               {"steps", traj.times.size() - 1},
               {"final", io::state_to_json(fs)},
               {"max_identity_defect", traj.max_identity_defect},
               {"endemic_infectious_fraction", endemic_fraction},
               {"fraction_over_eps", endemic_fraction / eps}};
  if (summary_path.empty())
    std::cerr << summary.dump(2) << "\n";
  else
    write_output(summary_path, summary.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-time-scale stability analysis toolkit"};
  app.require_subcommand(1);

  std::string matrix_path, params_path, coeffs_text, config_path, init_path;
  std::string out_path, summary_path, eps_text, format = "json";
  double eps = 1e-3, t_end = 50.0;
  std::uint64_t seed = default_seed();
  int jobs = 1;

  auto* sc_charpoly = app.add_subcommand("charpoly", "characteristic polynomial of a matrix");
  sc_charpoly->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  sc_charpoly->add_option("--out", out_path, "output file (default stdout)");

  auto* sc_routh = app.add_subcommand("routh", "Routh array and stability verdict");
  sc_routh->add_option("--coeffs", coeffs_text, "1,c1,...,cn (reals or Gamma-polys)")->required();
  sc_routh->add_option("--out", out_path, "output file (default stdout)");

  auto* sc_analyze = app.add_subcommand("analyze", "R0, c, equilibria and stability report");
  sc_analyze->add_option("--params", params_path, "params JSON file")->required();
  sc_analyze->add_option("--out", out_path, "output file (default stdout)");

  auto* sc_verify = app.add_subcommand("verify", "asymptotic vs numeric verdicts across eps");
  sc_verify->add_option("--params", params_path, "params JSON file")->required();
  sc_verify->add_option("--eps", eps_text, "comma-separated eps list")->required();
  sc_verify->add_option("--out", out_path, "output file (default stdout)");
  sc_verify->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sc_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  sc_sweep->add_option("--config", config_path, "sweep config JSON file")->required();
  auto* seed_opt = sc_sweep->add_option("--seed", seed, "PRNG seed (default 42 or TSSA_SEED)");
  auto* jobs_opt = sc_sweep->add_option("--jobs", jobs, "worker count");
  sc_sweep->add_option("--out", out_path, "output file (default stdout)");

  auto* sc_simulate = app.add_subcommand("simulate", "integrate the rescaled system");
  sc_simulate->add_option("--params", params_path, "params JSON file")->required();
  sc_simulate->add_option("--eps", eps, "epsilon (>= 1e-6)")->required();
  sc_simulate->add_option("--t-end", t_end, "end time (slow units)")->required();
  sc_simulate->add_option("--init", init_path, "initial state JSON (default: near-DFE)");
  sc_simulate->add_option("--out", out_path, "trajectory CSV (default stdout)");
  sc_simulate->add_option("--summary", summary_path, "summary JSON (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sc_charpoly->parsed()) return cmd_charpoly(matrix_path, out_path);
    if (sc_routh->parsed()) return cmd_routh(coeffs_text, out_path);
    if (sc_analyze->parsed()) return cmd_analyze(params_path, out_path);
    if (sc_verify->parsed()) return cmd_verify(params_path, eps_text, out_path, format);
    if (sc_sweep->parsed())
      return cmd_sweep(config_path, seed, seed_opt->count() > 0, jobs, jobs_opt->count() > 0,
                       out_path);
    if (sc_simulate->parsed())
      return cmd_simulate(params_path, eps, t_end, init_path, out_path, summary_path);
  } catch (const nlohmann::json::exception& e) {
    emit_error(std::string("invalid JSON: ") + e.what());
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    emit_error(e.what());
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    emit_error(e.what());
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

#include "tssa/json_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace tssa::io {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& context) {
  if (!obj.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw std::invalid_argument(context + ": unknown field '" + key + "'");
  }
  for (const auto& key : required)
    if (!obj.count(key)) throw std::invalid_argument(context + ": missing field '" + key + "'");
}

double number_at(const json& obj, const std::string& key, const std::string& context) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw std::invalid_argument(context + ": field '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

MatrixInput parse_matrix_json(const json& j) {
  require_keys(j, {"n", "entries"}, {"n", "entries"}, "matrix");
  if (!j.at("n").is_number_integer()) throw std::invalid_argument("matrix: 'n' must be an integer");
  const int n = j.at("n").get<int>();
  const auto& rows = j.at("entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("matrix: 'entries' must be an array of n rows");

  bool any_string = false;
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("matrix: each row must have n entries");
    for (const auto& v : row) {
      if (v.is_string())
        any_string = true;
      else if (!v.is_number())
        throw std::invalid_argument("matrix: entries must be numbers or Gamma-poly strings");
    }
  }

  if (!any_string) {
    SquareMatrix<double> m(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m.at(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
    return m;
  }
  SquareMatrix<GammaPoly> m(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const auto& v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      m.at(i, k) = v.is_string() ? parse_gamma_poly(v.get<std::string>())
                                 : GammaPoly(v.get<double>());
    }
  return m;
}

model::Params parse_params_json(const json& j) {
  require_keys(j, {"dimensionless", "dimensional"}, {}, "params");
  if (j.count("dimensionless") == j.count("dimensional"))
    throw std::invalid_argument(
        "params: provide exactly one of 'dimensionless' or 'dimensional'");

  if (j.count("dimensionless")) {
    const auto& d = j.at("dimensionless");
    const std::set<std::string> keys = {"epsilon", "b", "m", "rho", "psi", "omega", "sigma", "f"};
    require_keys(d, keys, keys, "params.dimensionless");
    return model::Params::from_dimensionless(
        number_at(d, "epsilon", "params"), number_at(d, "b", "params"),
        number_at(d, "m", "params"), number_at(d, "rho", "params"),
        number_at(d, "psi", "params"), number_at(d, "omega", "params"),
        number_at(d, "sigma", "params"), number_at(d, "f", "params"));
  }

  const auto& d = j.at("dimensional");
  const std::set<std::string> keys = {"beta", "gamma", "delta", "eta", "mu", "Psi", "Omega", "sigma", "f"};
  require_keys(d, keys, keys, "params.dimensional");
  model::DimParams dp;
  dp.beta = number_at(d, "beta", "params");
  dp.gamma = number_at(d, "gamma", "params");
  dp.delta = number_at(d, "delta", "params");
  dp.eta = number_at(d, "eta", "params");
  dp.mu = number_at(d, "mu", "params");
  dp.Psi = number_at(d, "Psi", "params");
  dp.Omega = number_at(d, "Omega", "params");
  dp.sigma = number_at(d, "sigma", "params");
  dp.f = number_at(d, "f", "params");
  return model::nondimensionalize(dp);
}

model::Params load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open params file: " + path);
  json j;
  in >> j;
  return parse_params_json(j);
}

json params_to_json(const model::Params& p) {
  return json{{"epsilon", p.epsilon}, {"b", p.b},        {"m", p.m},
              {"rho", p.rho},         {"psi", p.psi},    {"omega", p.omega},
              {"sigma", p.sigma},     {"f", p.f},        {"Sigma", p.Sigma},
              {"kappa", p.kappa},     {"h", p.h},        {"c", p.c},
              {"R0", p.R0}};
}

json state_to_json(const model::State& s) {
  return json{{"X", s.X}, {"Y", s.Y}, {"S", s.S}, {"U", s.U}, {"N", s.N}};
}

json ede_to_json(const model::EdeState& e) {
  return json{{"z", e.z}, {"y", e.y}, {"s", e.s}, {"u", e.u}, {"p", e.p},
              {"q", e.q}, {"v", e.v}, {"r", e.r}, {"w", e.w}, {"N", e.N}};
}

json conditions_to_json(const model::StabilityConditions& c) {
  return json{{"A", c.A},
              {"B", c.B},
              {"C", c.C},
              {"k", {c.k[0], c.k[1], c.k[2], c.k[3], c.k[4]}},
              {"q", {c.q1, c.q2}},
              {"margin", c.margin}};
}

json verdict_to_json(const Verdict& v) {
  return json{{"state", to_string(v.state)}, {"margin", v.margin}};
}

json report_to_json(const sweep::PointAnalysis& a) {
  json edes = json::array();
  for (const auto& e : a.edes)
    edes.push_back(json{{"state", ede_to_json(e.ede)},
                        {"conditions", conditions_to_json(e.cond)},
                        {"verdict", to_string(e.cond.verdict.state)},
                        {"margin", e.cond.margin}});
  json verdicts{{"dfe_asymptotic", to_string(a.dfe_asym)},
                {"dfe_numeric", to_string(a.dfe_numeric.state)}};
  json ede_verdicts = json::array();
  for (const auto& e : a.edes) ede_verdicts.push_back(to_string(e.cond.verdict.state));
  verdicts["ede"] = ede_verdicts;
  return json{{"params", params_to_json(a.params)},
              {"r0", a.params.R0},
              {"c", a.params.c},
              {"dfe", json{{"state", state_to_json(a.dfe_state)},
                           {"asymptotic", to_string(a.dfe_asym)},
                           {"numeric", verdict_to_json(a.dfe_numeric)}}},
              {"ede", edes},
              {"verdicts", verdicts}};
}

json verify_rows_to_json(const std::vector<sweep::VerifyRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json row{{"eps", r.eps},
             {"equilibrium", r.equilibrium < 0 ? "DFE" : "EDE[" + std::to_string(r.equilibrium) + "]"},
             {"asymptotic", to_string(r.asym)},
             {"asym_margin", r.asym_margin},
             {"oracle_ok", r.oracle_ok},
             {"agree", r.agree},
             {"near_margin", r.near_margin}};
    if (r.oracle_ok) row["num_max_re"] = r.num_max_re;
    out.push_back(row);
  }
  return out;
}

model::State parse_state_json(const json& j) {
  const std::set<std::string> keys = {"X", "Y", "S", "U", "N"};
  require_keys(j, keys, keys, "state");
  model::State s;
  s.X = number_at(j, "X", "state");
  s.Y = number_at(j, "Y", "state");
  s.S = number_at(j, "S", "state");
  s.U = number_at(j, "U", "state");
  s.N = number_at(j, "N", "state");
  return s;
}

sweep::SweepConfig parse_sweep_config(const json& j) {
  require_keys(j, {"samples", "seed", "jobs", "epsilon", "numeric", "ranges"}, {"samples"},
               "sweep config");
  sweep::SweepConfig cfg;
  if (!j.at("samples").is_number_integer() || j.at("samples").get<long long>() <= 0)
    throw std::invalid_argument("sweep config: 'samples' must be a positive integer");
  cfg.samples = j.at("samples").get<std::uint64_t>();
  if (j.count("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.count("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.count("numeric")) cfg.numeric = j.at("numeric").get<bool>();
  if (j.count("epsilon")) cfg.ranges.epsilon = number_at(j, "epsilon", "sweep config");
  if (j.count("ranges")) {
    const auto& r = j.at("ranges");
    require_keys(r, {"b", "sigma", "m", "rho", "psi", "omega", "f"}, {}, "sweep config ranges");
    auto span = [&](const char* key, double& lo, double& hi) {
      if (!r.count(key)) return;
      const auto& v = r.at(key);
      if (!v.is_array() || v.size() != 2)
        throw std::invalid_argument(std::string("sweep config: range '") + key +
                                    "' must be [lo, hi]");
      lo = v[0].get<double>();
      hi = v[1].get<double>();
      if (!(lo <= hi))
        throw std::invalid_argument(std::string("sweep config: range '") + key + "' has lo > hi");
    };
    span("b", cfg.ranges.b_lo, cfg.ranges.b_hi);
    span("sigma", cfg.ranges.sigma_lo, cfg.ranges.sigma_hi);
    span("m", cfg.ranges.m_lo, cfg.ranges.m_hi);
    span("rho", cfg.ranges.rho_lo, cfg.ranges.rho_hi);
    span("psi", cfg.ranges.psi_lo, cfg.ranges.psi_hi);
    span("omega", cfg.ranges.omega_lo, cfg.ranges.omega_hi);
    span("f", cfg.ranges.f_lo, cfg.ranges.f_hi);
  }
  return cfg;
}

}  // namespace tssa::io

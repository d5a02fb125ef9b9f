#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "tssa/sweep.hpp"

namespace tssa::io {

using MatrixInput = std::variant<SquareMatrix<double>, SquareMatrix<GammaPoly>>;

// {"n": int, "entries": [[row-major]]} with numeric entries, or strings
// "a + b*G^p" for Gamma-polynomial matrices.  Unknown keys are rejected.
MatrixInput parse_matrix_json(const nlohmann::json& j);

// {"dimensionless": {epsilon, b, m, rho, psi, omega, sigma, f}} or
// {"dimensional": {beta, gamma, delta, eta, mu, Psi, Omega, sigma, f}}.
// Unknown keys are rejected.
model::Params parse_params_json(const nlohmann::json& j);

model::Params load_params_file(const std::string& path);

nlohmann::json params_to_json(const model::Params& p);
nlohmann::json state_to_json(const model::State& s);
nlohmann::json ede_to_json(const model::EdeState& e);
nlohmann::json conditions_to_json(const model::StabilityConditions& c);
nlohmann::json verdict_to_json(const Verdict& v);

nlohmann::json report_to_json(const sweep::PointAnalysis& a);
nlohmann::json verify_rows_to_json(const std::vector<sweep::VerifyRow>& rows);

// {"X":..., "Y":..., "S":..., "U":..., "N":...}; unknown keys rejected.
model::State parse_state_json(const nlohmann::json& j);

sweep::SweepConfig parse_sweep_config(const nlohmann::json& j);

}  // namespace tssa::io

#pragma once

#include "scalelaw/analysis.hpp"
#include "scalelaw/inference.hpp"
#include "scalelaw/powerlaw.hpp"
#include "scalelaw/solver.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scalelaw {

using nlohmann::json;

/// 17 significant digits, enough to round-trip any double.
std::string format_exact(double v);
/// 4 significant digits in scientific notation, for human tables.
std::string format_human(double v);

json params_to_json(const ScalingParams& params, ScalingForm form);
/// Returns the params and their form; `alpha` must be given positive.
std::pair<ScalingParams, ScalingForm> params_from_json(const json& j);

json fit_to_json(const FitResult& fit);
/// Accepts a full fit document or a bare parameter object (which yields a
/// converged FitResult with n = p = 0 and no covariance).
FitResult fit_from_json(const json& j);

json validation_to_json(const ValidationReport& report);
std::string validation_to_csv(const ValidationReport& report);

json comparison_to_json(const ComparisonReport& report);
std::string comparison_to_text(const ComparisonReport& report);

json predictions_to_json(std::span<const PredictionRow> rows);
std::string predictions_to_csv(std::span<const PredictionRow> rows);
std::string predictions_to_text(std::span<const PredictionRow> rows);

json dopt_to_json(const DoptChain& chain);
std::string dopt_to_csv(const DoptChain& chain);
std::string dopt_to_text(const DoptChain& chain);

json form_table_to_json(std::span<const FormScore> table);

/// CSV `model_id,gflops_per_sample`.
std::vector<ModelCandidate> candidates_from_csv(std::string_view text);
/// Two-column numeric CSV with a header line, e.g. `compute,d_opt`.
std::vector<Observation> pairs_from_csv(std::string_view text);

/// Comma-separated reals, e.g. "5e10,1e11,5e11".
std::vector<double> parse_real_list(std::string_view text);

/// One row per grid point: x, y_hat, lo, hi from predict_ci (lo = hi = y_hat
/// when the fit has no covariance).
std::string emit_curve_csv(const FitResult& fit, std::span<const double> x_grid, double alpha = 0.05);

}  // namespace scalelaw

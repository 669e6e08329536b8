#include "scalelaw/serialize.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <sstream>

namespace scalelaw {

std::string format_exact(double v) { return fmt::format("{:.17g}", v); }

std::string format_human(double v) { return fmt::format("{:.3e}", v); }

namespace {

double number_at(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw InputError(fmt::format("JSON field '{}' is missing or not a number", key));
    return it->get<double>();
}

json interval_to_json(const std::optional<PredictionInterval>& pi) {
    if (!pi) return json();
    return {{"lo", pi->lo}, {"hi", pi->hi}, {"sigma", pi->sigma}, {"alpha", pi->alpha}, {"df", pi->df}};
}

double parse_number(std::string_view s, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw InputError(fmt::format("line {}: '{}' is not a number", line, s));
    return v;
}

std::vector<std::vector<std::string>> simple_csv_rows(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) {
            rows.emplace_back();
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

json params_to_json(const ScalingParams& p, ScalingForm form) {
    json j = {{"form", to_string(form)}, {"axis", to_string(p.axis)}};
    switch (form) {
        case ScalingForm::saturated:
            j["A"] = p.A;
            j["B"] = p.B;
            j["alpha"] = p.alpha;
            j["E"] = p.E;
            break;
        case ScalingForm::simple:
            j["A"] = p.A;
            j["B"] = p.B;
            j["alpha"] = p.alpha;
            break;
        case ScalingForm::loglog:
            j["D0"] = p.D0;
            j["a"] = p.a;
            break;
    }
    return j;
}

std::pair<ScalingParams, ScalingForm> params_from_json(const json& j) {
    if (!j.is_object()) throw InputError("scaling parameters must be a JSON object");
    const ScalingForm form = parse_form(j.value("form", std::string("saturated")));
    ScalingParams p;
    p.axis = parse_axis(j.value("axis", std::string("compute")));
    if (form == ScalingForm::loglog) {
        p.D0 = number_at(j, "D0");
        p.a = number_at(j, "a");
    } else {
        p.A = number_at(j, "A");
        p.B = j.contains("B") ? number_at(j, "B") : 0.0;
        p.alpha = number_at(j, "alpha");
        if (form == ScalingForm::saturated) p.E = number_at(j, "E");
    }
    const auto violations = check_shape(p, form);
    if (!violations.empty())
        throw InputError(fmt::format("scaling parameters violate shape constraints: {}", violations.front()));
    return {p, form};
}

json fit_to_json(const FitResult& fit) {
    json j = {{"params", params_to_json(fit.params, fit.form)},
              {"rss", fit.rss},
              {"n", fit.n},
              {"p", fit.p},
              {"converged", fit.converged},
              {"start_index", fit.start_index},
              {"residuals", fit.residuals}};
    if (fit.covariance) {
        std::vector<double> flat;
        const auto& c = *fit.covariance;
        for (Eigen::Index r = 0; r < c.rows(); ++r)
            for (Eigen::Index k = 0; k < c.cols(); ++k) flat.push_back(c(r, k));
        j["covariance"] = flat;
        j["covariance_rank"] = fit.covariance_rank;
        j["rank_deficient"] = fit.rank_deficient;
    } else {
        j["covariance"] = nullptr;
    }
    json starts = json::array();
    for (const auto& s : fit.starts)
        starts.push_back({{"rss", s.rss}, {"converged", s.converged}, {"iterations", s.iterations}});
    j["starts"] = std::move(starts);
    return j;
}

FitResult fit_from_json(const json& j) {
    if (!j.is_object()) throw InputError("fit document must be a JSON object");
    FitResult fit;
    if (!j.contains("params")) {
        std::tie(fit.params, fit.form) = params_from_json(j);
        fit.converged = true;
        return fit;
    }
    std::tie(fit.params, fit.form) = params_from_json(j.at("params"));
    fit.rss = j.value("rss", 0.0);
    fit.n = j.value("n", std::size_t{0});
    fit.p = j.value("p", parameter_count(fit.form));
    fit.converged = j.value("converged", true);
    fit.start_index = j.value("start_index", std::size_t{0});
    if (j.contains("residuals") && j["residuals"].is_array())
        fit.residuals = j["residuals"].get<std::vector<double>>();
    if (j.contains("covariance") && j["covariance"].is_array()) {
        const auto flat = j["covariance"].get<std::vector<double>>();
        const int p = parameter_count(fit.form);
        if (static_cast<int>(flat.size()) != p * p)
            throw InputError(fmt::format("covariance must have {} entries", p * p));
        Eigen::MatrixXd c(p, p);
        for (int r = 0; r < p; ++r)
            for (int k = 0; k < p; ++k) c(r, k) = flat[static_cast<std::size_t>(r * p + k)];
        fit.covariance = c;
        fit.covariance_rank = j.value("covariance_rank", p);
        fit.rank_deficient = j.value("rank_deficient", false);
    }
    return fit;
}

json validation_to_json(const ValidationReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"x", r.x},
                        {"observed", r.observed},
                        {"predicted", r.predicted},
                        {"interval", interval_to_json(r.interval)}});
    }
    return {{"c_threshold", std::isfinite(report.c_threshold) ? json(report.c_threshold) : json()},
            {"train_count", report.train_count},
            {"holdout_count", report.holdout_count},
            {"rmse_holdout", report.rmse_holdout},
            {"rows", std::move(rows)}};
}

std::string validation_to_csv(const ValidationReport& report) {
    std::string out = "x,observed,predicted,lo,hi\n";
    for (const auto& r : report.rows) {
        const double lo = r.interval ? r.interval->lo : r.predicted;
        const double hi = r.interval ? r.interval->hi : r.predicted;
        out += fmt::format("{},{},{},{},{}\n", format_exact(r.x), format_exact(r.observed),
                           format_exact(r.predicted), format_exact(lo), format_exact(hi));
    }
    return out;
}

json comparison_to_json(const ComparisonReport& report) {
    json derivs = json::array();
    for (const auto& r : report.scalability.rows)
        derivs.push_back({{"x", r.x}, {"slope_a", r.slope_a}, {"slope_b", r.slope_b}});
    json winners = json::array();
    for (const auto& w : report.winner_by_scale) winners.push_back({{"x", w.x}, {"label", w.label}});
    const auto verdict = report.scalability.stronger;
    return {
        {"label_a", report.label_a},
        {"label_b", report.label_b},
        {"fit_a", params_to_json(report.fit_a.params, report.fit_a.form)},
        {"fit_b", params_to_json(report.fit_b.params, report.fit_b.form)},
        {"range", {report.range_lo, report.range_hi}},
        {"crossover",
         {{"x", report.crossover.x ? json(*report.crossover.x) : json()},
          {"sign_changes", report.crossover.sign_changes},
          {"multiple", report.crossover.multiple()}}},
        {"derivative_table", std::move(derivs)},
        {"average_a", report.scalability.average_a},
        {"average_b", report.scalability.average_b},
        {"stronger_scalability",
         verdict == Verdict::a ? report.label_a : (verdict == Verdict::b ? report.label_b : "tie")},
        {"winner_by_scale", std::move(winners)},
        {"predictions", predictions_to_json(report.predictions)},
    };
}

std::string comparison_to_text(const ComparisonReport& report) {
    std::string out;
    out += fmt::format("Comparison: {} vs {}\n", report.label_a, report.label_b);
    if (report.crossover.x) {
        out += fmt::format("Crossover: {} on [{}, {}]{}\n", format_human(*report.crossover.x),
                           format_human(report.range_lo), format_human(report.range_hi),
                           report.crossover.multiple()
                               ? fmt::format(" ({} sign changes, smallest shown)", report.crossover.sign_changes)
                               : "");
    } else {
        out += fmt::format("Crossover: none on [{}, {}]\n", format_human(report.range_lo),
                           format_human(report.range_hi));
    }
    out += "\n";
    out += fmt::format("{:>12} | {:>14} | {:>14} | {}\n", "x", "|dL/dx| " + report.label_a,
                       "|dL/dx| " + report.label_b, "lower error");
    for (std::size_t i = 0; i < report.scalability.rows.size(); ++i) {
        const auto& r = report.scalability.rows[i];
        out += fmt::format("{:>12} | {:>14} | {:>14} | {}\n", format_human(r.x), format_human(r.slope_a),
                           format_human(r.slope_b), report.winner_by_scale[i].label);
    }
    out += fmt::format("{:>12} | {:>14} | {:>14} |\n", "average", format_human(report.scalability.average_a),
                       format_human(report.scalability.average_b));
    const auto v = report.scalability.stronger;
    out += fmt::format("Stronger scalability: {}\n",
                       v == Verdict::a ? report.label_a : (v == Verdict::b ? report.label_b : "tie"));
    if (!report.predictions.empty()) {
        out += "\n";
        out += predictions_to_text(report.predictions);
    }
    return out;
}

json predictions_to_json(std::span<const PredictionRow> rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row = {{"label", r.label},
                    {"target_compute", r.target_compute},
                    {"model_id", r.candidate.model_id},
                    {"gflops_per_sample", r.candidate.gflops_per_sample},
                    {"implied_samples", r.implied_samples},
                    {"error", r.error},
                    {"accuracy", r.accuracy},
                    {"interval", interval_to_json(r.interval)}};
        out.push_back(std::move(row));
    }
    return out;
}

std::string predictions_to_csv(std::span<const PredictionRow> rows) {
    std::string out =
        "label,model_id,implied_samples,target_compute,error,error_lo,error_hi,accuracy,accuracy_lo,accuracy_hi\n";
    for (const auto& r : rows) {
        const double lo = r.interval ? r.interval->lo : r.error;
        const double hi = r.interval ? r.interval->hi : r.error;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.label, r.candidate.model_id,
                           format_exact(r.implied_samples), format_exact(r.target_compute),
                           format_exact(r.error), format_exact(lo), format_exact(hi),
                           format_exact(r.accuracy), format_exact(1.0 - hi), format_exact(1.0 - lo));
    }
    return out;
}

std::string predictions_to_text(std::span<const PredictionRow> rows) {
    std::string out = fmt::format("{:<24} {:>10} {:>10} {:>26}\n", "Model candidate", "Samples", "GFLOPs",
                                  "Accuracy predicted (CI)");
    for (const auto& r : rows) {
        const std::string name = r.candidate.model_id.empty() ? r.label : r.candidate.model_id;
        const std::string samples =
            r.implied_samples > 0.0 ? fmt::format("{:.1f}B", r.implied_samples / 1e9) : std::string("-");
        const std::string acc =
            r.interval ? fmt::format("{:.3f} ({:.3f}, {:.3f})", r.accuracy, 1.0 - r.interval->hi,
                                     1.0 - r.interval->lo)
                       : fmt::format("{:.3f}", r.accuracy);
        out += fmt::format("{:<24} {:>10} {:>10} {:>26}\n", name, samples, fmt::format("{:.2e}", r.target_compute),
                           acc);
    }
    return out;
}

json dopt_to_json(const DoptChain& chain) {
    json rows = json::array();
    for (const auto& r : chain.rows) {
        rows.push_back({{"compute", r.compute},
                        {"d_opt", r.d_opt},
                        {"d_opt_lo", r.d_opt_lo},
                        {"d_opt_hi", r.d_opt_hi},
                        {"error", r.error},
                        {"accuracy", 1.0 - r.error},
                        {"error_interval", interval_to_json(r.error_interval)}});
    }
    const auto& f = chain.dopt_fit;
    return {{"dopt_fit",
             {{"D0", f.params.D0},
              {"a", f.params.a},
              {"intercept", f.intercept},
              {"slope", f.slope},
              {"intercept_se", f.intercept_se()},
              {"slope_se", f.slope_se()},
              {"n", f.n}}},
            {"rows", std::move(rows)}};
}

std::string dopt_to_csv(const DoptChain& chain) {
    std::string out = "compute,d_opt,d_opt_lo,d_opt_hi,error,error_lo,error_hi\n";
    for (const auto& r : chain.rows) {
        const double lo = r.error_interval ? r.error_interval->lo : r.error;
        const double hi = r.error_interval ? r.error_interval->hi : r.error;
        out += fmt::format("{},{},{},{},{},{},{}\n", format_exact(r.compute), format_exact(r.d_opt),
                           format_exact(r.d_opt_lo), format_exact(r.d_opt_hi), format_exact(r.error),
                           format_exact(lo), format_exact(hi));
    }
    return out;
}

std::string dopt_to_text(const DoptChain& chain) {
    const auto& f = chain.dopt_fit;
    std::string out = fmt::format("D_opt = {} * C^{:.4f}  (slope se {}, intercept se {})\n\n",
                                  format_human(f.params.D0), f.slope, format_human(f.slope_se()),
                                  format_human(f.intercept_se()));
    out += fmt::format("{:>10} {:>34} {:>26}\n", "GFLOPs", "D_opt predicted (CI)", "Accuracy predicted (CI)");
    for (const auto& r : chain.rows) {
        const std::string acc =
            r.error_interval ? fmt::format("{:.3f} ({:.3f}, {:.3f})", 1.0 - r.error, 1.0 - r.error_interval->hi,
                                           1.0 - r.error_interval->lo)
                             : fmt::format("{:.3f}", 1.0 - r.error);
        out += fmt::format("{:>10} {:>34} {:>26}\n", fmt::format("{:.2e}", r.compute),
                           fmt::format("{:.2e} ({:.2e}, {:.2e})", r.d_opt, r.d_opt_lo, r.d_opt_hi), acc);
    }
    return out;
}

json form_table_to_json(std::span<const FormScore> table) {
    json out = json::array();
    for (std::size_t i = 0; i < table.size(); ++i) {
        out.push_back({{"rank", i + 1},
                       {"form", to_string(table[i].form)},
                       {"rmse_holdout", table[i].rmse_holdout},
                       {"fit", fit_to_json(table[i].run.fit)},
                       {"validation", validation_to_json(table[i].run.report)}});
    }
    return out;
}

std::vector<ModelCandidate> candidates_from_csv(std::string_view text) {
    const auto rows = simple_csv_rows(text);
    std::vector<ModelCandidate> out;
    bool header = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        if (!header) {
            header = true;
            if (rows[i].size() < 2 || rows[i][0] != "model_id")
                throw InputError("candidates CSV needs header 'model_id,gflops_per_sample'");
            continue;
        }
        if (rows[i].size() < 2) throw InputError(fmt::format("line {}: expected 2 fields", i + 1));
        ModelCandidate c{rows[i][0], parse_number(rows[i][1], i + 1)};
        if (!(c.gflops_per_sample > 0.0))
            throw InputError(fmt::format("line {}: gflops_per_sample must be > 0", i + 1));
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Observation> pairs_from_csv(std::string_view text) {
    const auto rows = simple_csv_rows(text);
    std::vector<Observation> out;
    bool header = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        if (!header) {
            header = true;
            continue;
        }
        if (rows[i].size() < 2) throw InputError(fmt::format("line {}: expected 2 fields", i + 1));
        out.push_back({parse_number(rows[i][0], i + 1), parse_number(rows[i][1], i + 1)});
    }
    return out;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_number(piece, 1));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string emit_curve_csv(const FitResult& fit, std::span<const double> x_grid, double alpha) {
    if (x_grid.empty()) throw InputError("curve grid is empty");
    const bool with_interval =
        fit.covariance && static_cast<double>(fit.n) - static_cast<double>(fit.p) >= 1.0;
    std::string out = "x,y_hat,lo,hi\n";
    for (double x : x_grid) {
        if (!(x > 0.0)) throw InputError("curve grid values must be > 0");
        if (with_interval) {
            const auto pi = predict_ci(fit, x, alpha);
            out += fmt::format("{},{},{},{}\n", format_exact(x), format_exact(pi.y_hat), format_exact(pi.lo),
                               format_exact(pi.hi));
        } else {
            const double y = evaluate(fit.params, fit.form, x);
            out += fmt::format("{},{},{},{}\n", format_exact(x), format_exact(y), format_exact(y), format_exact(y));
        }
    }
    return out;
}

}  // namespace scalelaw

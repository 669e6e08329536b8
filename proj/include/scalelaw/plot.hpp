#pragma once

#include "scalelaw/frontier.hpp"
#include "scalelaw/solver.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scalelaw {

struct LabeledFit {
    std::string label;
    FitResult fit;
};

struct LabeledPoints {
    std::string label;
    std::vector<FrontierPoint> points;
};

struct PlotOptions {
    std::optional<std::pair<double, double>> x_range;  // defaults to the data's decades
    std::optional<std::pair<double, double>> y_range;  // defaults to the data, padded
    bool log_x = true;
    bool band = true;  // shaded interval for fits with a covariance
    double alpha = 0.05;
    int samples = 200;  // per curve, log-spaced
    int width = 800;
    int height = 500;
    std::string title;
    std::string x_label = "GFLOPs";
    std::string y_label = "error rate";
};

/// Standalone SVG with one polyline per fit, optional interval bands,
/// scatter points and a legend. Vertical grid lines sit at every decade
/// 10^k with lo < 10^k <= hi. Output is a pure function of the inputs.
std::string emit_plot(std::span<const LabeledFit> fits, std::span<const LabeledPoints> point_sets,
                      const PlotOptions& options = {});

}  // namespace scalelaw

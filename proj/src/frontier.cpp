#include "scalelaw/frontier.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace scalelaw {

namespace {

void require_valid(std::span<const Observation> points) {
    if (points.empty()) throw InputError("frontier extraction needs at least one point");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].x > 0.0) || !std::isfinite(points[i].x))
            throw InputError(fmt::format("point {} has non-positive x ({})", i, points[i].x));
        if (!std::isfinite(points[i].error))
            throw InputError(fmt::format("point {} has non-finite error", i));
    }
}

// Preference order inside a bin and among skyline duplicates.
bool better(const Observation& a, std::size_t ia, const Observation& b, std::size_t ib) {
    if (a.error != b.error) return a.error < b.error;
    if (a.x != b.x) return a.x < b.x;
    return ia < ib;
}

}  // namespace

std::size_t log_bin_index(double x, double x_min, double x_max, std::size_t n_bins) {
    if (n_bins <= 1 || x_max <= x_min) return 0;
    const double lo = std::log10(x_min);
    const double width = (std::log10(x_max) - lo) / static_cast<double>(n_bins);
    const double lx = std::log10(x);
    const auto last = static_cast<long long>(n_bins - 1);
    auto k = static_cast<long long>(std::floor((lx - lo) / width));
    k = std::clamp(k, 0LL, last);
    // Settle on the bin whose edges lo + k*width <= lx < lo + (k+1)*width,
    // so the division's rounding never decides membership.
    while (k > 0 && lx < lo + static_cast<double>(k) * width) --k;
    while (k < last && lx >= lo + static_cast<double>(k + 1) * width) ++k;
    return static_cast<std::size_t>(k);
}

std::vector<FrontierPoint> log_bin_minima(std::span<const Observation> points, std::size_t n_bins,
                                          Axis axis) {
    require_valid(points);
    if (n_bins < 1) throw InputError("n_bins must be >= 1");

    const auto [min_it, max_it] = std::minmax_element(
        points.begin(), points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    const double x_min = min_it->x;
    const double x_max = max_it->x;

    std::vector<std::optional<std::size_t>> best(n_bins);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& slot = best[log_bin_index(points[i].x, x_min, x_max, n_bins)];
        if (!slot || better(points[i], i, points[*slot], *slot)) slot = i;
    }

    std::vector<FrontierPoint> out;
    for (const auto& slot : best) {
        if (slot) out.push_back({points[*slot].x, points[*slot].error, *slot, axis});
    }
    return out;
}

std::vector<FrontierPoint> skyline_minima(std::span<const Observation> points, Axis axis) {
    require_valid(points);
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].x != points[b].x) return points[a].x < points[b].x;
        return better(points[a], a, points[b], b);
    });

    // After sorting by (x, error, index) a point survives iff its error is
    // strictly below every error seen so far.
    std::vector<FrontierPoint> out;
    for (std::size_t i : order) {
        if (out.empty() || points[i].error < out.back().error)
            out.push_back({points[i].x, points[i].error, i, axis});
    }
    return out;
}

std::vector<Observation> to_observations(std::span<const FrontierPoint> points) {
    std::vector<Observation> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.x, p.error});
    return out;
}

std::string frontier_to_csv(std::span<const FrontierPoint> points) {
    std::string out = "x,error,source_index,axis\n";
    for (const auto& p : points)
        out += fmt::format("{:.17g},{:.17g},{},{}\n", p.x, p.error, p.source_index, to_string(p.axis));
    return out;
}

std::vector<FrontierPoint> frontier_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<FrontierPoint> out;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line.rfind("x,error", 0) != 0)
                throw InputError(fmt::format("line {}: expected header 'x,error,source_index,axis'", line_no));
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2) throw InputError(fmt::format("line {}: expected at least x,error", line_no));
        FrontierPoint p;
        auto number = [&](const std::string& s, double& v) {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                throw InputError(fmt::format("line {}: '{}' is not a number", line_no, s));
        };
        number(fields[0], p.x);
        number(fields[1], p.error);
        if (!(p.x > 0.0)) throw InputError(fmt::format("line {}: x must be > 0", line_no));
        if (!(p.error >= 0.0 && p.error <= 1.0))
            throw InputError(fmt::format("line {}: error must lie in [0, 1]", line_no));
        p.source_index = out.size();
        if (fields.size() > 2 && !fields[2].empty()) {
            const auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(),
                                                   p.source_index);
            if (ec != std::errc()) throw InputError(fmt::format("line {}: bad source_index", line_no));
        }
        if (fields.size() > 3 && !fields[3].empty()) p.axis = parse_axis(fields[3]);
        out.push_back(p);
    }
    if (!header_seen) throw InputError("frontier CSV is empty");
    return out;
}

}  // namespace scalelaw

#pragma once

#include "scalelaw/axis.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace scalelaw {

/// A raw (resource, error) observation.
struct Observation {
    double x = 0.0;
    double error = 0.0;
};

/// An observation that survived frontier selection. `source_index` points
/// back into the list the frontier was extracted from.
struct FrontierPoint {
    double x = 0.0;
    double error = 0.0;
    std::size_t source_index = 0;
    Axis axis = Axis::compute;

    friend bool operator==(const FrontierPoint&, const FrontierPoint&) = default;
};

inline constexpr std::size_t kDefaultBinCount = 1500;

/// Minimal-error point of every occupied bin, with `n_bins` log-spaced bins
/// spanning [min x, max x] (last bin closed on the right). Ties go to the
/// smaller x, then the smaller source index. Sorted by x.
std::vector<FrontierPoint> log_bin_minima(std::span<const Observation> points,
                                          std::size_t n_bins = kDefaultBinCount,
                                          Axis axis = Axis::compute);

/// Bin index of `x` for `n_bins` log-spaced bins over [x_min, x_max].
std::size_t log_bin_index(double x, double x_min, double x_max, std::size_t n_bins);

/// Non-dominated set: p dominates q when p.x <= q.x and p.error <= q.error
/// with at least one strict. Exact duplicates keep the smallest source
/// index. Sorted by x with strictly decreasing error.
std::vector<FrontierPoint> skyline_minima(std::span<const Observation> points,
                                          Axis axis = Axis::samples);

std::vector<Observation> to_observations(std::span<const FrontierPoint> points);

/// CSV with header `x,error,source_index,axis`.
std::string frontier_to_csv(std::span<const FrontierPoint> points);
std::vector<FrontierPoint> frontier_from_csv(std::string_view text);

}  // namespace scalelaw

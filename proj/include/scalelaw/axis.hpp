#pragma once

#include <string>
#include <string_view>

namespace scalelaw {

/// Which resource a curve or frontier is expressed in: total pre-training
/// GFLOPs or samples seen.
enum class Axis { compute, samples };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

}  // namespace scalelaw

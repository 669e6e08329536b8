#pragma once

#include <doctest.h>

#include "oracles.hpp"

namespace testing {

// Purely relative comparison; doctest's default scale adds an absolute 1.
inline doctest::Approx rel(double value, double eps) { return doctest::Approx(value).epsilon(eps).scale(0.0); }

}  // namespace testing

#pragma once

#include "luxp/metrics.hpp"

namespace luxp::detail {

/// Throws unless the two images have equal shape and colour space tag.
void check_pair(const ImageBuffer& test, const ImageBuffer& reference);

/// Separable correlation with `taps` in both directions, keeping only the
/// region where the window fits entirely inside the plane.
Plane filter_valid(const Plane& in, const std::vector<double>& taps);

Plane multiply(const Plane& a, const Plane& b);

} // namespace luxp::detail

#pragma once

#include "dsmon/core/common.hpp"

#include <vector>

namespace dsmon {

/// Local polynomial (Savitzky-Golay style) differentiation settings.
struct SmoothingDifferentiator {
  Index window = 7;  ///< odd number of samples per local fit
  Index order = 3;   ///< polynomial degree; derivatives up to this order are available
};

/// Derivatives 0..max_order of sampled signals (rows of `samples`, one column
/// per grid point). Each point is fitted on the window centred on it, shifted
/// inwards near the ends of the grid. When max_order + 2 exceeds the fit
/// degree, the degree is raised to max_order + 2 and the window widened to
/// at least 2 * degree + 1 samples.
///
/// Throws ResolutionError when max_order exceeds the polynomial degree or the
/// grid is shorter than the window.
std::vector<Matrix> smooth_derivatives(const std::vector<double>& times, const Matrix& samples,
                                       Index max_order, const SmoothingDifferentiator& sg = {});

}  // namespace dsmon

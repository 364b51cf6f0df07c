#include "dsmon/regional/differentiation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsmon {

std::vector<Matrix> smooth_derivatives(const std::vector<double>& times, const Matrix& samples,
                                       Index max_order, const SmoothingDifferentiator& sg) {
  const Index steps = static_cast<Index>(times.size());
  if (samples.cols() != steps) throw DimensionError("samples do not match the grid");
  if (sg.window < 3 || sg.window % 2 == 0) throw DimensionError("window must be odd and >= 3");
  if (sg.order < 1 || sg.order >= sg.window) throw DimensionError("order must lie in [1, window)");
  if (max_order < 0) throw DimensionError("negative derivative order");
  if (max_order > sg.order) {
    throw ResolutionError("derivative of order " + std::to_string(max_order) +
                          " requested from a degree-" + std::to_string(sg.order) + " local fit");
  }
  // the top two requested orders get a fit two degrees higher
  const Index deg = std::max(sg.order, max_order + 2);
  const Index window = deg == sg.order ? sg.window : std::max(sg.window, 2 * deg + 1);
  if (steps < window) {
    throw ResolutionError("grid of " + std::to_string(steps) + " samples is shorter than the " +
                          std::to_string(window) + "-sample window");
  }

  std::vector<Matrix> out(static_cast<std::size_t>(max_order + 1),
                          Matrix::Zero(samples.rows(), steps));
  const Index half = window / 2;
  Matrix vander(window, deg + 1);
  for (Index k = 0; k < steps; ++k) {
    const Index first = std::clamp<Index>(k - half, 0, steps - window);
    const double t0 = times[static_cast<std::size_t>(k)];
    // scale time by the local spacing to keep the fit well conditioned
    const double h = (times[static_cast<std::size_t>(first + window - 1)] -
                      times[static_cast<std::size_t>(first)]) /
                     static_cast<double>(window - 1);
    for (Index i = 0; i < window; ++i) {
      const double s = (times[static_cast<std::size_t>(first + i)] - t0) / h;
      double pw = 1.0;
      for (Index j = 0; j <= deg; ++j) {
        vander(i, j) = pw;
        pw *= s;
      }
    }
    // coefficients c = (V^T V)^-1 V^T window; derivative j at s = 0 is j! c_j / h^j
    const Matrix coeffs = vander.colPivHouseholderQr().solve(
        samples.middleCols(first, window).transpose());
    double fact = 1.0;
    for (Index j = 0; j <= max_order; ++j) {
      if (j > 0) fact *= static_cast<double>(j);
      out[static_cast<std::size_t>(j)].col(k) = (fact / std::pow(h, static_cast<double>(j))) *
                                                coeffs.row(j).transpose();
    }
  }
  return out;
}

}  // namespace dsmon

#pragma once

#include <string>
#include <vector>

namespace kan {

/// Payload for the 1D comparison figure: prediction overlay on top, one knot
/// strip per strategy below.
struct FigureData {
  std::string task;
  std::vector<double> grid_x;  // network coordinates
  std::vector<double> y_true;
  std::vector<double> data_x;  // training scatter (subsampled)
  std::vector<double> data_y;
  // strategy order: input-based first, curvature-based second
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> y_pred;
  std::vector<std::vector<double>> knots;  // first-layer primary knots
};

void write_figure_svg(const std::string& path, const FigureData& fig);

}  // namespace kan

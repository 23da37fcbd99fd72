#pragma once

#include <string>
#include <vector>

namespace ucontract::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Self-contained SVG line plot. Every point is also written as a <circle>
/// carrying its exact values in data-x / data-y attributes.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

}  // namespace ucontract::cli

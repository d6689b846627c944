#pragma once

#include <string>
#include <vector>

namespace nlt {

struct PlotSeries {
  std::string label;
  std::string color = "#000000";
  std::vector<double> x;
  std::vector<double> y;
};

// Static SVG line plot; NaN samples split a series into segments.
std::string line_plot_svg(std::string const& title, std::string const& xlabel,
                          std::string const& ylabel, std::vector<PlotSeries> const& series);

}  // namespace nlt

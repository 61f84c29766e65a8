#pragma once

#include <string>
#include <vector>

namespace gpbo::plot {

struct BandSeries {
  std::string name;
  std::vector<double> center;
  std::vector<double> lower;  // may be empty
  std::vector<double> upper;  // may be empty
};

/// Self-contained SVG line chart, x = 1..n, with shaded percentile bands.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<BandSeries>& series);

}  // namespace gpbo::plot

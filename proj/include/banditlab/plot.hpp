#pragma once

#include <string>
#include <vector>

namespace banditlab {

// One polyline on a chart. NaN y-values mark gaps (the line breaks there).
struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line chart. Purely decorative output; every number
// shown here also lives in a CSV, which is the artifact of record.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<Series>& series);

// Trailing moving average with the window shrunk at the start; NaN entries
// are ignored inside the window and returned where a window holds nothing.
std::vector<double> moving_average(const std::vector<double>& values,
                                   int window);

}  // namespace banditlab

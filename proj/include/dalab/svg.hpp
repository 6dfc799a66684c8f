#pragma once

#include <string>
#include <vector>

namespace dalab {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band;  // optional +/- band half-width (std); may be empty
};

// Minimal static line chart: axes, ticks, polylines, shaded std bands.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace dalab

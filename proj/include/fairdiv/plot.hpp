// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_PLOT_HPP
#define FAIRDIV_PLOT_HPP

#include <string>
#include <vector>

namespace fairdiv {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double error = 0.0;  // half-length of the error bar (e.g. SEM)
};

struct PlotSeries {
  std::string name;
  std::vector<PlotPoint> points;
};

// Writes an SVG line chart: one polyline per series, vertical error bars,
// axes and a legend. Points with non-finite y are skipped.
void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace fairdiv

#endif  // FAIRDIV_PLOT_HPP

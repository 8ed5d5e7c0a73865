// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "fairdiv/errors.hpp"

namespace fairdiv {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const PlotSeries& s : series) {
    for (const PlotPoint& p : s.points) {
      if (!std::isfinite(p.y)) continue;
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.y - p.error);
      y_max = std::max(y_max, p.y + p.error);
    }
  }
  if (!std::isfinite(x_min)) {  // nothing plottable
    x_min = 0.0;
    x_max = 1.0;
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double x) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto sy = [&](double y) {
    return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes.
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";

  // Tick labels at the extremes plus midpoints.
  for (double frac : {0.0, 0.5, 1.0}) {
    const double xv = x_min + frac * (x_max - x_min);
    const double yv = y_min + frac * (y_max - y_min);
    out << "<text x=\"" << sx(xv) << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << sy(yv) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }

  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 12 << "\" font-size=\"13\" text-anchor=\"middle\">"
      << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"22\" "
      << "font-size=\"15\" text-anchor=\"middle\">" << title << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (const PlotPoint& p : series[s].points) {
      if (!std::isfinite(p.y)) continue;
      points += fmt(sx(p.x)) + "," + fmt(sy(p.y)) + " ";
      if (p.error > 0.0) {
        out << "<line x1=\"" << fmt(sx(p.x)) << "\" y1=\""
            << fmt(sy(p.y - p.error)) << "\" x2=\"" << fmt(sx(p.x))
            << "\" y2=\"" << fmt(sy(p.y + p.error)) << "\" stroke=\"" << color
            << "\" stroke-width=\"1\"/>\n";
      }
    }
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";

    const double legend_y = kMarginTop + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kMarginRight + 12 << "\" y1=\""
        << legend_y << "\" x2=\"" << kWidth - kMarginRight + 34 << "\" y2=\""
        << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\""
        << legend_y + 4 << "\" font-size=\"12\">" << series[s].name
        << "</text>\n";
  }

  out << "</svg>\n";
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

}  // namespace fairdiv

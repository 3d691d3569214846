#pragma once

#include <string>
#include <vector>

namespace skewlab {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<SvgSeries> series;
  int width = 640;
  int height = 420;
};

/// SVG 1.1 line chart: one polyline per series, axis ticks, labels and a legend.
/// Non-finite points (and x <= 0 on a log axis) are skipped.
std::string render_svg(const SvgChart& chart);

}  // namespace skewlab

#pragma once

#include <string>
#include <vector>

namespace satint::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

/// Standalone SVG document with axes, ticks, a legend and one polyline per
/// series. Long series are decimated to at most ~2000 points per line.
std::string render(const LinePlot& plot);

/// Palette used for multi-series plots.
const std::string& color(std::size_t index);

}  // namespace satint::svg

#include "satint/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace satint::svg {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick step covering `span` with roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

const std::string& color(std::size_t index) {
  static const std::array<std::string, 6> palette{"#d62728", "#1f77b4", "#2ca02c",
                                                  "#9467bd", "#ff7f0e", "#17becf"};
  return palette[index % palette.size()];
}

std::string render(const LinePlot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double left = 70, right = 20, top = 36, bottom = 50;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)"
      "\n",
      plot.width, plot.height);
  os << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)"
                    "\n",
                    plot.width, plot.height);
  os << fmt::format(R"(<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>)"
                    "\n",
                    plot.width / 2, escape(plot.title));
  os << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)"
                    "\n",
                    left, top, pw, ph);

  const double xs = nice_step(xmax - xmin, 8);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    os << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#ddd"/>)"
                      R"(<text x="{0:.2f}" y="{3:.2f}" text-anchor="middle">{4:g}</text>)"
                      "\n",
                      sx(t), top, top + ph, top + ph + 16, std::abs(t) < 1e-12 * xs ? 0.0 : t);
  }
  const double ys = nice_step(ymax - ymin, 6);
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    os << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="#ddd"/>)"
                      R"(<text x="{3:.2f}" y="{4:.2f}" text-anchor="end">{5:g}</text>)"
                      "\n",
                      left, sy(t), left + pw, left - 6, sy(t) + 4,
                      std::abs(t) < 1e-12 * ys ? 0.0 : t);
  }
  os << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)"
                    "\n",
                    left + pw / 2, plot.height - 10, escape(plot.x_label));
  os << fmt::format(
      R"svg(<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>)svg"
      "\n",
      top + ph / 2, escape(plot.y_label));

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    os << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points=")", s.color);
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.y[i])) continue;
      os << fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
    }
    if (n > 0 && (n - 1) % stride != 0) os << fmt::format("{:.2f},{:.2f}", sx(s.x[n - 1]), sy(s.y[n - 1]));
    os << "\"/>\n";
    const double ly = top + 14 + 16 * static_cast<double>(k);
    os << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}" stroke-width="2"/>)"
                      R"(<text x="{4}" y="{5}">{6}</text>)"
                      "\n",
                      left + pw - 110, ly, left + pw - 90, s.color, left + pw - 85, ly + 4,
                      escape(s.label));
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace satint::svg

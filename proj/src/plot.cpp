#include "nlt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nlt {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 80.0, kRight = 770.0, kTop = 50.0, kBottom = 440.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string line_plot_svg(std::string const& title, std::string const& xlabel,
                          std::string const& ylabel, std::vector<PlotSeries> const& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (PlotSeries const& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  double const ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(0.5 * kWidth) + "\" y=\"28\" font-family=\"monospace\" font-size=\"16\""
         " text-anchor=\"middle\">" + title + "</text>\n";

  for (int k = 0; k <= 5; ++k) {
    double const fx = xmin + (xmax - xmin) * k / 5.0;
    double const fy = ymin + (ymax - ymin) * k / 5.0;
    double const gx = px(fx), gy = py(fy);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(gx) + "\" y2=\"" +
           num(kBottom) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(kRight) +
           "\" y2=\"" + num(gy) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(kBottom + 18.0) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" + num(fx) +
           "</text>\n";
    svg += "<text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(gy + 4.0) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" + num(fy) +
           "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kRight - kLeft) +
         "\" height=\"" + num(kBottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(0.5 * (kLeft + kRight)) + "\" y=\"" + num(kHeight - 14.0) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" + xlabel +
         "</text>\n";
  svg += "<text x=\"20\" y=\"" + num(0.5 * (kTop + kBottom)) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate("
         "-90 20 " + num(0.5 * (kTop + kBottom)) + ")\">" + ylabel + "</text>\n";

  double legend_y = kTop + 16.0;
  for (PlotSeries const& s : series) {
    std::string points;
    bool open = false;
    auto flush = [&]() {
      if (open && !points.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
               points + "\"/>\n";
      }
      points.clear();
      open = false;
    };
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        flush();
        continue;
      }
      points += num(px(s.x[k])) + "," + num(py(s.y[k])) + " ";
      open = true;
    }
    flush();
    svg += "<line x1=\"" + num(kRight - 150.0) + "\" y1=\"" + num(legend_y) + "\" x2=\"" +
           num(kRight - 120.0) + "\" y2=\"" + num(legend_y) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(kRight - 112.0) + "\" y=\"" + num(legend_y + 4.0) +
           "\" font-family=\"monospace\" font-size=\"12\">" + s.label + "</text>\n";
    legend_y += 18.0;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace nlt

#include "banditlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace banditlab {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 860.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 392.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<Series>& series) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const Series& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("render_line_chart: x/y length mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (!(x_min <= x_max)) {  // no finite points at all
    x_min = 0.0; x_max = 1.0; y_min = 0.0; y_max = 1.0;
  }
  if (x_max == x_min) { x_max += 1.0; }
  if (y_max == y_min) { y_max += 1.0; y_min -= 1.0; }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto sy = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         tick_label(kWidth) + "\" height=\"" + tick_label(kHeight) +
         "\" viewBox=\"0 0 " + tick_label(kWidth) + " " +
         tick_label(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape(title) + "</text>\n";

  // Axes and gridlines with 5 divisions each.
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const double px = sx(fx);
    const double py = sy(fy);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(px) + "\" y2=\"" + num(kBottom) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(kRight) + "\" y2=\"" + num(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kBottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + tick_label(fx) + "</text>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + tick_label(fy) + "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" +
         num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + escape(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " +
         num((kTop + kBottom) / 2) + ")\">" + escape(y_label) + "</text>\n";

  for (const Series& s : series) {
    std::string points;
    const auto flush = [&]() {
      if (!points.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) {
        flush();
        continue;
      }
      points += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
    }
    flush();
  }

  double legend_y = kTop + 16;
  for (const Series& s : series) {
    svg += "<line x1=\"" + num(kRight - 150) + "\" y1=\"" + num(legend_y) +
           "\" x2=\"" + num(kRight - 120) + "\" y2=\"" + num(legend_y) +
           "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kRight - 112) + "\" y=\"" + num(legend_y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(s.label) + "</text>\n";
    legend_y += 18;
  }

  svg += "</svg>\n";
  return svg;
}

std::vector<double> moving_average(const std::vector<double>& values,
                                   int window) {
  if (window < 1) {
    throw std::invalid_argument("moving_average: window must be >= 1");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t begin =
        i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = begin; j <= i; ++j) {
      if (std::isnan(values[j])) continue;
      sum += values[j];
      ++count;
    }
    out[i] = count > 0 ? sum / count
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace banditlab

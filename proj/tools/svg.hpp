#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ges/format.hpp"

// Minimal line-chart writer: log-y polylines with a legend, no dependencies.

namespace ges::tools {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string escape_xml(const std::string& s) {
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

inline std::string line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<Series>& series, bool log_y) {
  const double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && !(s.y[i] > 0))) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!(xmax > xmin)) { xmin -= 1; xmax += 1; }
  if (!(ymax > ymin)) { ymin -= 1; ymax += 1; }
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };
  auto num = [](double v) { return format_double(v, 6); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left) + "\" y=\"24\" font-size=\"15\">" + escape_xml(title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 12) + "\" font-size=\"12\" text-anchor=\"middle\">" +
         escape_xml(xlabel) + "</text>\n";
  out += "<text x=\"14\" y=\"" + num(top + ph / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " +
         num(top + ph / 2) + ")\" text-anchor=\"middle\">" + escape_xml(ylabel) + "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    const double ylab = log_y ? std::pow(10.0, yv) : yv;
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 16) + "\" font-size=\"10\" text-anchor=\"middle\">" +
           format_double(xv, 3) + "</text>\n";
    const double yy = top + (1.0 - (yv - ymin) / (ymax - ymin)) * ph;
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(yy + 3) + "\" font-size=\"10\" text-anchor=\"end\">" +
           format_double(ylab, 3) + "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const std::string color = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && !(s.y[i] > 0))) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(s.x[i])) + ',' + num(py(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + num(W - right + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(W - right + 32) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(W - right + 38) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + escape_xml(s.name) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ges::tools

#pragma once

// Minimal SVG line plots on log-log axes, with an optional fitted power law
// overlaid as a dashed line.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "emhd/io/report.hpp"

namespace emhd::io {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<double> slope;  // fitted exponent, drawn through the series' geometric centre
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
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

inline std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Plot positive samples only; non-positive values cannot be shown on log axes.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t n = 0; n < s.x.size() && n < s.y.size(); ++n)
      if (s.x[n] > 0.0 && s.y[n] > 0.0) {
        x0 = std::min(x0, std::log10(s.x[n]));
        x1 = std::max(x1, std::log10(s.x[n]));
        y0 = std::min(y0, std::log10(s.y[n]));
        y1 = std::max(y1, std::log10(s.y[n]));
      }
  const bool empty = !(x1 >= x0);
  if (empty) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<clipPath id=\"plot\"><rect x=\"" + detail::fmt(L) + "\" y=\"" + detail::fmt(T) + "\" width=\"" +
         detail::fmt(W - L - R) + "\" height=\"" + detail::fmt(H - T - B) + "\"/></clipPath>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         detail::svg_escape(title) + "</text>\n";
  out += "<rect x=\"" + detail::fmt(L) + "\" y=\"" + detail::fmt(T) + "\" width=\"" + detail::fmt(W - L - R) +
         "\" height=\"" + detail::fmt(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d)
    out += "<text x=\"" + detail::fmt(px(d)) + "\" y=\"" + detail::fmt(H - B + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d)
    out += "<text x=\"" + detail::fmt(L - 6) + "\" y=\"" + detail::fmt(py(d) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  out += "<text x=\"" + detail::fmt(0.5 * (L + W - R)) + "\" y=\"" + detail::fmt(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + detail::svg_escape(xlabel) + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::fmt(0.5 * (T + H - B)) + "\" transform=\"rotate(-90 16 " +
         detail::fmt(0.5 * (T + H - B)) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         detail::svg_escape(ylabel) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % std::size(colors)];
    std::string pts;
    double sx = 0.0, sy = 0.0;
    int cnt = 0;
    for (std::size_t n = 0; n < s.x.size() && n < s.y.size(); ++n) {
      if (!(s.x[n] > 0.0 && s.y[n] > 0.0)) continue;
      const double lx = std::log10(s.x[n]), ly = std::log10(s.y[n]);
      pts += detail::fmt(px(lx)) + "," + detail::fmt(py(ly)) + " ";
      sx += lx;
      sy += ly;
      ++cnt;
    }
    if (cnt > 0)
      out += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    std::string label = s.label;
    if (s.slope && cnt > 0) {
      const double cx = sx / cnt, cy = sy / cnt;
      auto clip = [&](double lx) { return cy + *s.slope * (lx - cx); };
      out += "<line x1=\"" + detail::fmt(px(x0)) + "\" y1=\"" + detail::fmt(py(clip(x0))) + "\" x2=\"" +
             detail::fmt(px(x1)) + "\" y2=\"" + detail::fmt(py(clip(x1))) + "\" stroke=\"" + col +
             "\" stroke-dasharray=\"6,4\" clip-path=\"url(#plot)\"/>\n";
      label += " (slope " + detail::fmt(*s.slope, 3) + ")";
    }
    out += "<text x=\"" + detail::fmt(L + 10) + "\" y=\"" + detail::fmt(T + 16 + 15.0 * static_cast<double>(k)) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + col + "\">" + detail::svg_escape(label) + "</text>\n";
  }
  if (empty)
    out += "<text x=\"320\" y=\"210\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">no positive data</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace emhd::io

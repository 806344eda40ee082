#ifndef CIRCLEABC_SVG_HPP
#define CIRCLEABC_SVG_HPP

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace abc {

namespace detail {

// Fixed-format coordinate rendering so plots are byte-reproducible.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string svg_open(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\">\n";
}

}  // namespace detail

// Unit-square curve plot (e.g. the graph of a circle map lift).
inline std::string curve_svg(const std::vector<std::pair<double, double>>& pts,
                             const std::string& title) {
  const int W = 480, H = 480, M = 40;
  std::string s = detail::svg_open(W, H);
  s += "<title>" + title + "</title>\n";
  s += "<rect x=\"" + std::to_string(M) + "\" y=\"" + std::to_string(M) +
       "\" width=\"" + std::to_string(W - 2 * M) + "\" height=\"" +
       std::to_string(H - 2 * M) +
       "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" "
       "points=\"";
  for (const auto& [x, y] : pts) {
    double px = M + x * (W - 2 * M);
    double py = H - M - y * (H - 2 * M);
    s += detail::fmt(px) + "," + detail::fmt(py) + " ";
  }
  s += "\"/>\n</svg>\n";
  return s;
}

// Histogram bar plot; densities are in multiples of the flat density 1.
inline std::string histogram_svg(const std::vector<double>& density,
                                 const std::string& title) {
  const int W = 480, H = 320, M = 40;
  double peak = 1.0;
  for (double d : density) peak = d > peak ? d : peak;
  std::string s = detail::svg_open(W, H);
  s += "<title>" + title + "</title>\n";
  s += "<rect x=\"" + std::to_string(M) + "\" y=\"" + std::to_string(M) +
       "\" width=\"" + std::to_string(W - 2 * M) + "\" height=\"" +
       std::to_string(H - 2 * M) +
       "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  std::size_t n = density.size();
  for (std::size_t j = 0; j < n; ++j) {
    double w = double(W - 2 * M) / double(n);
    double h = (density[j] / peak) * (H - 2 * M);
    s += "<rect x=\"" + detail::fmt(M + j * w) + "\" y=\"" +
         detail::fmt(H - M - h) + "\" width=\"" + detail::fmt(w) +
         "\" height=\"" + detail::fmt(h) + "\" fill=\"#b33f3f\"/>\n";
  }
  // reference line at the flat density
  double y1 = H - M - (1.0 / peak) * (H - 2 * M);
  s += "<line x1=\"" + std::to_string(M) + "\" y1=\"" + detail::fmt(y1) +
       "\" x2=\"" + std::to_string(W - M) + "\" y2=\"" + detail::fmt(y1) +
       "\" stroke=\"#333\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace abc

#endif  // CIRCLEABC_SVG_HPP

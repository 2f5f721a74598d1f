/*
 * plot.hh
 *
 * Minimal SVG renderer for trace-versus-bound figures.
 */
#ifndef IODS_PLOT_HH_
#define IODS_PLOT_HH_

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace iods {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> values;
};

inline void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                           const std::string& title = "") {
  const double W = 860, H = 420, ml = 60, mr = 20, mt = 40, mb = 40;
  double lo = 0, hi = 1e-12;
  std::size_t n = 1;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1;
  auto X = [&](std::size_t t) { return ml + (W - ml - mr) * (n > 1 ? double(t) / (n - 1) : 0.5); };
  auto Y = [&](double v) { return H - mb - (H - mt - mb) * (v - lo) / (hi - lo); };

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-family='sans-serif' "
     << "font-size='14'>" << title << "</text>\n";
  /* axes */
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = lo + (hi - lo) * k / 4;
    os << "<text x='" << ml - 6 << "' y='" << Y(v) + 4
       << "' text-anchor='end' font-family='sans-serif' font-size='11'>";
    std::ostringstream t;
    t.precision(4);
    t << v;
    os << t.str() << "</text>\n";
    os << "<line x1='" << ml - 3 << "' y1='" << Y(v) << "' x2='" << ml << "' y2='" << Y(v)
       << "' stroke='black'/>\n";
  }
  double ly = mt;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
    for (std::size_t t = 0; t < s.values.size(); ++t)
      os << X(t) << "," << Y(s.values[t]) << " ";
    os << "'/>\n";
    os << "<text x='" << W - mr - 4 << "' y='" << ly
       << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='" << s.color << "'>"
       << s.label << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
}

}  // namespace iods

#endif  // IODS_PLOT_HH_

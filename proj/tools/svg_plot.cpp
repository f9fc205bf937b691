#include "svg_plot.hpp"

#include "f0priv/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace f0priv::cli {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick step giving roughly `target` intervals over `span`.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series) {
  double t_max = 0.0;
  double f_lo = std::numeric_limits<double>::infinity();
  double f_hi = -std::numeric_limits<double>::infinity();
  for (const PlotSeries& s : series) {
    const F0Trajectory& t = s.trajectory;
    if (t.size() == 0) throw Error(ErrorKind::kEmpty, "plot: empty trajectory '" + s.label + "'");
    t_max = std::max(t_max, t.time(t.size() - 1));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (!t.voiced(i)) continue;
      f_lo = std::min(f_lo, t.values[i]);
      f_hi = std::max(f_hi, t.values[i]);
    }
  }
  if (!std::isfinite(f_lo)) {
    f_lo = 0.0;
    f_hi = 100.0;
  }
  if (f_hi - f_lo < 1.0) {
    f_lo -= 10.0;
    f_hi += 10.0;
  }
  const double pad = 0.05 * (f_hi - f_lo);
  f_lo = std::max(0.0, f_lo - pad);
  f_hi += pad;
  if (t_max <= 0.0) t_max = 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + plot_w * t / t_max; };
  auto py = [&](double f) { return kTop + plot_h * (1.0 - (f - f_lo) / (f_hi - f_lo)); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + plot_h) + "\" x2=\"" +
         fmt(kLeft + plot_w) + "\" y2=\"" + fmt(kTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kTop + plot_h) + "\"/>\n";
  const double t_step = tick_step(t_max, 8);
  for (double t = 0.0; t <= t_max + 1e-9; t += t_step) {
    svg += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(kTop + plot_h + 16) +
           "\" stroke=\"none\" text-anchor=\"middle\">" + fmt(t) + "</text>\n";
  }
  const double f_step = tick_step(f_hi - f_lo, 6);
  for (double f = std::ceil(f_lo / f_step) * f_step; f <= f_hi; f += f_step) {
    svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(f) + 4) +
           "\" stroke=\"none\" text-anchor=\"end\">" + fmt(f) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 10) +
         "\" stroke=\"none\" text-anchor=\"middle\">time (s)</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(kTop + plot_h / 2) +
         "\" stroke=\"none\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(kTop + plot_h / 2) + ")\">F0 (Hz)</text>\n";
  svg += "</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const F0Trajectory& t = series[k].trajectory;
    const char* color = kPalette[k % kPalette.size()];
    std::string d;
    bool in_run = false;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (!t.voiced(i)) {
        in_run = false;
        continue;
      }
      d += in_run ? " L" : (d.empty() ? "M" : " M");
      d += fmt(px(t.time(i))) + "," + fmt(py(t.values[i]));
      in_run = true;
    }
    svg += "<path class=\"f0-trace\" data-label=\"" + escape(series[k].label) +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" d=\"" + d + "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">";
    svg += "<line x1=\"" + fmt(kWidth - kRight + 15) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(kWidth - kRight + 35) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>";
    svg += "<text x=\"" + fmt(kWidth - kRight + 40) + "\" y=\"" + fmt(ly) + "\">" +
           escape(series[k].label) + "</text></g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace f0priv::cli

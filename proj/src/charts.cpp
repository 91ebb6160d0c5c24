#include "dagopt/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dagopt/io.hpp"

namespace dagopt {

namespace {

constexpr double kPanelW = 320.0, kPanelH = 240.0;
constexpr double kMarginL = 52.0, kMarginR = 12.0, kMarginT = 28.0,
                 kMarginB = 30.0;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

}  // namespace

std::string render_panels_svg(const std::vector<ChartPanel>& panels) {
  const double width = kPanelW * panels.size();
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    fmt(width) + "\" height=\"" + fmt(kPanelH) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const ChartPanel& panel = panels[p];
    const double x0 = p * kPanelW + kMarginL;
    const double x1 = (p + 1) * kPanelW - kMarginR;
    const double y0 = kPanelH - kMarginB;  // bottom
    const double y1 = kMarginT;            // top

    std::size_t max_len = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : panel.series) {
      max_len = std::max(max_len, s.y.size());
      for (double v : s.y) {
        if (!std::isfinite(v)) continue;
        if (panel.log_y && v <= 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (panel.log_y) {
      lo = std::log10(lo);
      hi = std::log10(hi);
    }
    if (hi - lo < 1e-12) {
      hi += 0.5;
      lo -= 0.5;
    }

    const auto map_x = [&](std::size_t i) {
      const double t = max_len > 1 ? static_cast<double>(i) / (max_len - 1) : 0.5;
      return x0 + t * (x1 - x0);
    };
    const auto map_y = [&](double v) {
      double t = panel.log_y ? std::log10(v) : v;
      t = (t - lo) / (hi - lo);
      return y0 + t * (y1 - y0);
    };

    svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" +
           fmt(x1 - x0) + "\" height=\"" + fmt(y0 - y1) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(y1 - 8) +
           "\" text-anchor=\"middle\">" + panel.title +
           (panel.log_y ? " (log)" : "") + "</text>\n";
    svg += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(y0 + 22) +
           "\" text-anchor=\"middle\">k</text>\n";
    svg += "<text x=\"" + fmt(x0 - 4) + "\" y=\"" + fmt(y0) +
           "\" text-anchor=\"end\">" + fmt(panel.log_y ? std::pow(10, lo) : lo) +
           "</text>\n";
    svg += "<text x=\"" + fmt(x0 - 4) + "\" y=\"" + fmt(y1 + 4) +
           "\" text-anchor=\"end\">" + fmt(panel.log_y ? std::pow(10, hi) : hi) +
           "</text>\n";

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const auto& series = panel.series[s];
      std::string points;
      for (std::size_t i = 0; i < series.y.size(); ++i) {
        const double v = series.y[i];
        if (!std::isfinite(v) || (panel.log_y && v <= 0.0)) continue;
        points += fmt(map_x(i)) + "," + fmt(map_y(v)) + " ";
      }
      if (points.empty()) continue;
      svg += "<polyline fill=\"none\" stroke=\"" +
             std::string(kColors[s % 4]) + "\" stroke-width=\"1.5\" points=\"" +
             points + "\"/>\n";
      if (!series.label.empty()) {
        svg += "<text x=\"" + fmt(x0 + 6) + "\" y=\"" +
               fmt(y1 + 14 + 13.0 * s) + "\" fill=\"" + kColors[s % 4] + "\">" +
               series.label + "</text>\n";
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

void write_trace_chart(const std::filesystem::path& path, const Trace& trace) {
  std::vector<double> rho, alpha, h, cycles;
  for (const auto& r : trace) {
    rho.push_back(r.rho);
    alpha.push_back(r.alpha);
    h.push_back(r.h);
    cycles.push_back(static_cast<double>(r.cycles_005));
  }
  std::vector<ChartPanel> panels(4);
  panels[0] = {"rho_k", true, {{"", rho}}};
  panels[1] = {"alpha_k", false, {{"", alpha}}};
  panels[2] = {"h(B_k)", true, {{"", h}}};
  panels[3] = {"cycles (0.05)", false, {{"", cycles}}};
  atomic_write_text(path, render_panels_svg(panels));
}

}  // namespace dagopt

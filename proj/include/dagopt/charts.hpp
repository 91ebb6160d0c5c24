#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dagopt/solvers.hpp"

namespace dagopt {

// Minimal SVG line charts for eyeballing traces; the CSVs stay the contract.
struct ChartSeries {
  std::string label;
  std::vector<double> y;  // indexed by iteration
};

struct ChartPanel {
  std::string title;
  bool log_y = false;
  std::vector<ChartSeries> series;
};

std::string render_panels_svg(const std::vector<ChartPanel>& panels);

// Four panels against k: rho, alpha, h, simple-cycle count.
void write_trace_chart(const std::filesystem::path& path, const Trace& trace);

}  // namespace dagopt

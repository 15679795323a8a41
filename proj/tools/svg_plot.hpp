#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace consortium::tools {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool line = false; ///< polyline instead of dots
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Standalone SVG with linear axes fitted to the data. Deterministic output.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec);

} // namespace consortium::tools

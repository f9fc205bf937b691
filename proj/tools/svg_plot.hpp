#pragma once

#include "f0priv/trajectory.hpp"

#include <string>
#include <vector>

namespace f0priv::cli {

struct PlotSeries {
  std::string label;
  F0Trajectory trajectory;
};

/// Self-contained SVG line plot: one <path class="f0-trace"> per series, where
/// every voiced run opens a new subpath so unvoiced frames show as gaps.
/// Axes are seconds and Hz. Throws kEmpty on an empty series.
std::string render_svg(const std::vector<PlotSeries>& series);

}  // namespace f0priv::cli

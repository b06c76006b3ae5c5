#pragma once

#include <string>

#include "engulf/report.hpp"

namespace engulf {

enum class PlotKind { SectionBoundary, RatioCurve };

// Deterministic SVG (fixed 800x600 canvas, polyline over the report table,
// axes with min/max labels); byte-identical for equal reports.
//   RatioCurve      -- first two numeric table columns as (x, y)
//   SectionBoundary -- "px"/"py" columns of a 2D section report, closed
// Throws std::invalid_argument on an empty or unsuitable table.
std::string emit_plot(const ExperimentReport& report, PlotKind kind);

}  // namespace engulf

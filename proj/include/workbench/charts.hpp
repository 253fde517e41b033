// Adams-convention charts (horizontal n, vertical s) as SVG and plain text.
#pragma once

#include <string>
#include <vector>

#include "workbench/hopfcohomology.hpp"
#include "workbench/spectralsequences.hpp"

namespace wb {

struct ChartGlyph {
  enum Kind { Free, Torsion, FreeTower, TruncatedTower };
  int x = 0, y = 0;
  int color = 0;  // index mod 9
  Kind kind = Free;
  int count = 1;  // number of summands, or nested circles for a truncated tower
  std::string label;
};

struct ChartData {
  std::string title;
  std::vector<ChartGlyph> glyphs;
  int xmax = 0, ymax = 0;
};

// Columns named "n" and "s" give the axes; for (s, t, ...) gradings n = t - s. The color index is the
// "m" column when present, otherwise the last column beyond the axes. When towers are present only
// their births are drawn.
ChartData chart_from_report(const RunReport& report);
ChartData chart_from_report_json(const std::string& text);
ChartData chart_from_ext(const ExtTable& table);

std::string render_svg(const ChartData& chart);
std::string render_text(const ChartData& chart);

}  // namespace wb

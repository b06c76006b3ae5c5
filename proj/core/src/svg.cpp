#include "engulf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "engulf/detail/format.hpp"

namespace engulf {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

struct Series {
  std::vector<double> x, y;
};

std::optional<size_t> find_column(const Table& t, const std::string& name) {
  for (size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  return std::nullopt;
}

Series extract(const ExperimentReport& r, PlotKind kind) {
  const Table& t = r.table;
  if (t.rows.empty()) throw std::invalid_argument("emit_plot: empty table");

  size_t xi = 0, yi = 1;
  if (kind == PlotKind::SectionBoundary) {
    const auto px = find_column(t, "px");
    const auto py = find_column(t, "py");
    if (!px || !py)
      throw std::invalid_argument("emit_plot: section-boundary needs the px/py columns of a 2D section report");
    xi = *px;
    yi = *py;
  } else {
    if (t.columns.size() < 2)
      throw std::invalid_argument("emit_plot: ratio-curve needs at least two columns");
  }

  Series s;
  for (const auto& row : t.rows) {
    if (xi >= row.size() || yi >= row.size()) continue;
    if (!std::holds_alternative<double>(row[xi]) || !std::holds_alternative<double>(row[yi]))
      continue;
    const double x = std::get<double>(row[xi]);
    const double y = std::get<double>(row[yi]);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    s.x.push_back(x);
    s.y.push_back(y);
  }
  if (s.x.empty()) throw std::invalid_argument("emit_plot: no finite data points");
  if (kind == PlotKind::SectionBoundary && s.x.size() > 2) {
    s.x.push_back(s.x.front());  // close the boundary polyline
    s.y.push_back(s.y.front());
  }
  return s;
}

void append_text(std::string& out, double x, double y, const std::string& text,
                 const char* anchor) {
  out += "<text x=\"" + detail::format_fixed(x, 2) + "\" y=\"" + detail::format_fixed(y, 2) +
         "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"" + anchor + "\">" + text +
         "</text>\n";
}

}  // namespace

std::string emit_plot(const ExperimentReport& report, PlotKind kind) {
  const Series s = extract(report, kind);

  double xmin = *std::min_element(s.x.begin(), s.x.end());
  double xmax = *std::max_element(s.x.begin(), s.x.end());
  double ymin = *std::min_element(s.y.begin(), s.y.end());
  double ymax = *std::max_element(s.y.begin(), s.y.end());
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  const double x0 = xmin - xpad, x1 = xmax + xpad;
  const double y0 = ymin - ypad, y1 = ymax + ypad;

  const auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  const auto sy = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  // axes
  out += "<rect x=\"" + detail::format_fixed(kLeft, 2) + "\" y=\"" + detail::format_fixed(kTop, 2) +
         "\" width=\"" + detail::format_fixed(kWidth - kLeft - kRight, 2) + "\" height=\"" +
         detail::format_fixed(kHeight - kTop - kBottom, 2) +
         "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
  append_text(out, kLeft, kHeight - kBottom + 16, detail::format_double(xmin), "start");
  append_text(out, kWidth - kRight, kHeight - kBottom + 16, detail::format_double(xmax), "end");
  append_text(out, kLeft - 6, kHeight - kBottom, detail::format_double(ymin), "end");
  append_text(out, kLeft - 6, kTop + 10, detail::format_double(ymax), "end");
  append_text(out, kLeft, kTop - 10, report.experiment + " / " + report.function_tag, "start");

  out += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < s.x.size(); ++i) {
    if (i) out += ' ';
    out += detail::format_fixed(sx(s.x[i]), 2) + "," + detail::format_fixed(sy(s.y[i]), 2);
  }
  out += "\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace engulf

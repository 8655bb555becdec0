#ifndef WEYLSCHA_REPORT_HPP
#define WEYLSCHA_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "weylscha/errors.hpp"

// Deterministic result persistence: CSV / JSON with fixed %.12e float
// formatting, and a standalone SVG line-plot emitter.  Identical input
// produces byte-identical output.

namespace weylscha::report {

using Cell = std::variant<double, long long, std::string>;

inline std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    const double v = std::get<double>(cell);
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
  }
  if (std::holds_alternative<long long>(cell)) {
    return std::to_string(std::get<long long>(cell));
  }
  return std::get<std::string>(cell);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("Table: row width mismatch");
    rows.push_back(std::move(row));
  }

  double value(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == column) {
        const Cell& cell = rows[row][c];
        if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
        if (std::holds_alternative<long long>(cell)) {
          return static_cast<double>(std::get<long long>(cell));
        }
        return std::nan("");
      }
    }
    throw Error("Table: unknown column " + column);
  }
};

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out += t.columns[c];
    out += (c + 1 < t.columns.size()) ? "," : "\n";
  }
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += format_cell(row[c]);
      out += (c + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

inline std::string to_json(const Table& t) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "  {";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out += "\"" + t.columns[c] + "\": ";
      const Cell& cell = t.rows[r][c];
      if (std::holds_alternative<std::string>(cell)) {
        out += "\"" + std::get<std::string>(cell) + "\"";
      } else if (std::holds_alternative<double>(cell) &&
                 std::isnan(std::get<double>(cell))) {
        out += "null";
      } else {
        out += format_cell(cell);
      }
      if (c + 1 < t.columns.size()) out += ", ";
    }
    out += (r + 1 < t.rows.size()) ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + path);
  f << content;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct PlotSpec {
  std::string x_column;
  std::vector<std::string> y_columns;
  std::string group_by;  // optional: one curve per distinct value per y column
  std::string title;
  std::string x_label;
  std::string y_label;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[i % 8];
}

}  // namespace detail

/// Render the table as a standalone SVG with axes, tick labels and one
/// labeled polyline per series.  Rows with non-finite values are skipped;
/// a single point renders as a marker.  Throws on an empty record set.
inline std::string emit_svg(const Table& t, const PlotSpec& spec) {
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  for (const auto& ycol : spec.y_columns) {
    std::map<std::string, std::size_t> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double x = t.value(r, spec.x_column);
      const double y = t.value(r, ycol);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      std::string label = ycol;
      if (!spec.group_by.empty()) {
        label = ycol + " [" + spec.group_by + "=" +
                detail::fmt_tick(t.value(r, spec.group_by)) + "]";
      }
      auto it = groups.find(label);
      if (it == groups.end()) {
        groups.emplace(label, series.size());
        series.push_back({label, {}});
        it = groups.find(label);
      }
      series[it->second].pts.push_back({x, y});
    }
  }
  std::size_t total_pts = 0;
  for (const auto& s : series) total_pts += s.pts.size();
  if (total_pts == 0) throw Error("emit_svg: no plottable records");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax - xmin < 1e-300) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-300) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double w = 800, h = 600, ml = 80, mr = 160, mt = 50, mb = 60;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto sy = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  svg += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"17\" "
           "font-family=\"sans-serif\">" + spec.title + "</text>\n";
  }
  // axes
  svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(h - mb) + "\" x2=\"" +
         detail::fmt(w - mr) + "\" y2=\"" + detail::fmt(h - mb) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(mt) + "\" x2=\"" +
         detail::fmt(ml) + "\" y2=\"" + detail::fmt(h - mb) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    svg += "<line x1=\"" + detail::fmt(sx(xv)) + "\" y1=\"" + detail::fmt(h - mb) +
           "\" x2=\"" + detail::fmt(sx(xv)) + "\" y2=\"" + detail::fmt(h - mb + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::fmt(sx(xv)) + "\" y=\"" + detail::fmt(h - mb + 20) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" +
           detail::fmt_tick(xv) + "</text>\n";
    svg += "<line x1=\"" + detail::fmt(ml - 5) + "\" y1=\"" + detail::fmt(sy(yv)) +
           "\" x2=\"" + detail::fmt(ml) + "\" y2=\"" + detail::fmt(sy(yv)) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::fmt(ml - 10) + "\" y=\"" + detail::fmt(sy(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" +
           detail::fmt_tick(yv) + "</text>\n";
  }
  if (!spec.x_label.empty()) {
    svg += "<text x=\"" + detail::fmt((ml + w - mr) / 2) + "\" y=\"" + detail::fmt(h - 15) +
           "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" +
           spec.x_label + "</text>\n";
  }
  if (!spec.y_label.empty()) {
    svg += "<text x=\"20\" y=\"" + detail::fmt((mt + h - mb) / 2) +
           "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 " + detail::fmt((mt + h - mb) / 2) + ")\">" +
           spec.y_label + "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& color = detail::palette(s);
    if (series[s].pts.size() == 1) {
      svg += "<circle cx=\"" + detail::fmt(sx(series[s].pts[0].first)) + "\" cy=\"" +
             detail::fmt(sy(series[s].pts[0].second)) + "\" r=\"4\" fill=\"" + color +
             "\"/>\n";
    } else {
      svg += "<polyline fill=\"none\" stroke=\"";
      svg += color;
      svg += "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : series[s].pts) {
        svg += detail::fmt(sx(x)) + "," + detail::fmt(sy(y)) + " ";
      }
      svg += "\"/>\n";
    }
    const double ly = mt + 18.0 * s;
    svg += "<line x1=\"" + detail::fmt(w - mr + 10) + "\" y1=\"" + detail::fmt(ly) +
           "\" x2=\"" + detail::fmt(w - mr + 30) + "\" y2=\"" + detail::fmt(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + detail::fmt(w - mr + 35) + "\" y=\"" + detail::fmt(ly + 4) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + series[s].label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace weylscha::report

#endif

// Copyright 2026 The lenlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV tables and standalone SVG charts for evaluation results.
//
// Scatter CSV header: target_len,ratio,violation
// Sweep CSV header:   scale,violation_rate,win_rate,mean_words,series

#ifndef LENLIFT_REPORT_HPP_
#define LENLIFT_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenlift/error.hpp"
#include "lenlift/evalmetrics.hpp"
#include "lenlift/jsonl.hpp"
#include "lenlift/records.hpp"

namespace lenlift {

inline constexpr std::string_view kScatterCsvHeader = "target_len,ratio,violation";
inline constexpr std::string_view kSweepCsvHeader = "scale,violation_rate,win_rate,mean_words,series";

struct ScatterPoint {
  std::string entry_id;
  std::size_t target_len = 0;
  double ratio = 0.0;  // word_count / target_len
  bool violation = false;

  bool operator==(const ScatterPoint&) const = default;
};

/// One point per successful generation, ordered by entry id. Failed
/// generations carry no length and are left out.
inline std::vector<ScatterPoint> scatter_data(std::span<const BenchmarkEntry> bench,
                                              std::span<const GenerationRecord> gens) {
  std::map<std::string_view, const BenchmarkEntry*> entries;
  for (const auto& e : bench) entries.emplace(e.id, &e);
  std::vector<ScatterPoint> out;
  out.reserve(gens.size());
  for (const auto& g : gens) {
    auto it = entries.find(g.entry_id);
    if (it == entries.end()) throw ValidationError("generation for unknown entry " + g.entry_id);
    if (g.failed()) continue;
    const auto target = it->second->target_len;
    out.push_back(ScatterPoint{g.entry_id, target,
                               static_cast<double>(g.word_count) / static_cast<double>(target),
                               g.word_count > target});
  }
  std::sort(out.begin(), out.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) { return a.entry_id < b.entry_id; });
  return out;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Rounds an axis maximum up to 1, 2 or 5 times a power of ten.
inline double nice_ceiling(double v) {
  if (v <= 0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (v <= m * p + 1e-12) return m * p;
  }
  return 10.0 * p;
}

}  // namespace detail

/// The CSV row for a point, without the line break. SVG titles reuse it.
inline std::string scatter_row(const ScatterPoint& p) {
  return std::to_string(p.target_len) + "," + detail::fixed(p.ratio, 4) + "," + (p.violation ? "true" : "false");
}

inline std::string sweep_row(const EvalSummary& s, std::string_view series) {
  return detail::fixed(s.scale, 2) + "," + detail::fixed(s.violation_rate, 1) + "," +
         (s.win_rate ? detail::fixed(*s.win_rate, 1) : std::string()) + "," + detail::fixed(s.mean_words, 1) +
         "," + detail::csv_field(series);
}

inline std::string scatter_csv(std::span<const ScatterPoint> points) {
  std::string out(kScatterCsvHeader);
  out += '\n';
  for (const auto& p : points) out += scatter_row(p) + "\n";
  return out;
}

inline std::string sweep_csv(std::span<const SweepResult> sweeps) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& s : sweeps) {
    for (const auto& p : s.points) out += sweep_row(p, s.series) + "\n";
  }
  return out;
}

namespace detail {

struct Frame {
  static constexpr double kWidth = 640, kHeight = 420;
  static constexpr double kLeft = 60, kRight = 150, kTop = 30, kBottom = 50;
  double x_min, x_max, y_min, y_max;

  double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom); }
};

inline std::string svg_open(std::string_view title) {
  std::string s = R"(<?xml version="1.0" encoding="UTF-8"?>)"
                  "\n"
                  R"(<svg xmlns="http://www.w3.org/2000/svg" width="640" height="420" viewBox="0 0 640 420">)"
                  "\n"
                  "<style>\n"
                  "  .axis { stroke: #333; stroke-width: 1; fill: none; }\n"
                  "  .grid { stroke: #ddd; stroke-width: 1; }\n"
                  "  .limit { stroke: #888; stroke-width: 1; stroke-dasharray: 4 3; }\n"
                  "  .violation { fill: #d62728; }\n"
                  "  .compliant { fill: #1f77b4; }\n"
                  "  text { font-family: sans-serif; font-size: 11px; fill: #222; }\n"
                  "</style>\n"
                  R"(<rect width="640" height="420" fill="white"/>)"
                  "\n";
  s += "<text x=\"320\" y=\"18\" text-anchor=\"middle\">" + xml_escape(title) + "</text>\n";
  return s;
}

inline std::string svg_axes(const Frame& f, std::string_view x_label, std::string_view y_label, int ticks = 5) {
  std::string s;
  const double x0 = Frame::kLeft, x1 = Frame::kWidth - Frame::kRight;
  const double y0 = Frame::kHeight - Frame::kBottom, y1 = Frame::kTop;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = f.x_min + (f.x_max - f.x_min) * i / ticks;
    const double yv = f.y_min + (f.y_max - f.y_min) * i / ticks;
    const auto xp = fixed(f.px(xv), 1), yp = fixed(f.py(yv), 1);
    s += "<line class=\"grid\" x1=\"" + xp + "\" y1=\"" + fixed(y0, 1) + "\" x2=\"" + xp + "\" y2=\"" +
         fixed(y1, 1) + "\"/>\n";
    s += "<line class=\"grid\" x1=\"" + fixed(x0, 1) + "\" y1=\"" + yp + "\" x2=\"" + fixed(x1, 1) + "\" y2=\"" +
         yp + "\"/>\n";
    s += "<text x=\"" + xp + "\" y=\"" + fixed(y0 + 16, 1) + "\" text-anchor=\"middle\">" + fixed(xv, 2) +
         "</text>\n";
    s += "<text x=\"" + fixed(x0 - 6, 1) + "\" y=\"" + fixed(f.py(yv) + 4, 1) + "\" text-anchor=\"end\">" +
         fixed(yv, 2) + "</text>\n";
  }
  s += "<path class=\"axis\" d=\"M" + fixed(x0, 1) + " " + fixed(y1, 1) + " V" + fixed(y0, 1) + " H" +
       fixed(x1, 1) + "\"/>\n";
  s += "<text x=\"" + fixed((x0 + x1) / 2, 1) + "\" y=\"" + fixed(Frame::kHeight - 12, 1) +
       "\" text-anchor=\"middle\">" + xml_escape(x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + fixed((y0 + y1) / 2, 1) + ") rotate(-90)\" text-anchor=\"middle\">" +
       xml_escape(y_label) + "</text>\n";
  return s;
}

// Legend swatches are rects so that circles count data points only.
inline std::string svg_legend_item(int row, std::string_view cls_or_color, std::string_view label,
                                   bool is_class) {
  const double x = Frame::kWidth - Frame::kRight + 16, y = Frame::kTop + 10 + 18.0 * row;
  std::string s = "<rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y - 8, 1) + "\" width=\"10\" height=\"10\" ";
  s += is_class ? "class=\"" + std::string(cls_or_color) + "\"" : "fill=\"" + std::string(cls_or_color) + "\"";
  s += "/>\n<text x=\"" + fixed(x + 16, 1) + "\" y=\"" + fixed(y + 1, 1) + "\">" + xml_escape(label) +
       "</text>\n";
  return s;
}

inline constexpr std::string_view kSeriesColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                                                     "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

}  // namespace detail

/// Generated/target ratio against target length. One circle per point, with
/// the matching CSV row as its title.
inline std::string scatter_svg(std::span<const ScatterPoint> points, std::string_view title = "Length ratio") {
  if (points.empty()) throw ValidationError("no scatter points to plot");
  double x_max = 0, y_max = 1.0;
  for (const auto& p : points) {
    x_max = std::max(x_max, static_cast<double>(p.target_len));
    y_max = std::max(y_max, p.ratio);
  }
  const detail::Frame f{0.0, detail::nice_ceiling(x_max), 0.0, detail::nice_ceiling(y_max * 1.05)};
  std::string s = detail::svg_open(title);
  s += detail::svg_axes(f, "target length (words)", "generated / target");
  const auto limit_y = detail::fixed(f.py(1.0), 1);
  s += "<line class=\"limit\" x1=\"" + detail::fixed(f.px(f.x_min), 1) + "\" y1=\"" + limit_y + "\" x2=\"" +
       detail::fixed(f.px(f.x_max), 1) + "\" y2=\"" + limit_y + "\"/>\n";
  s += "<g class=\"points\">\n";
  for (const auto& p : points) {
    s += "<circle class=\"" + std::string(p.violation ? "violation" : "compliant") + "\" cx=\"" +
         detail::fixed(f.px(static_cast<double>(p.target_len)), 2) + "\" cy=\"" + detail::fixed(f.py(p.ratio), 2) +
         "\" r=\"3\"><title>" + scatter_row(p) + "</title></circle>\n";
  }
  s += "</g>\n";
  s += detail::svg_legend_item(0, "violation", "violation", true);
  s += detail::svg_legend_item(1, "compliant", "within limit", true);
  s += "</svg>\n";
  return s;
}

/// Violation rate against scale factor, one polyline and one marker per
/// point for each series.
inline std::string sweep_svg(std::span<const SweepResult> sweeps, std::string_view title = "Violation rate by scale") {
  std::size_t n = 0;
  for (const auto& s : sweeps) n += s.points.size();
  if (n == 0) throw ValidationError("no sweep points to plot");
  const detail::Frame f{0.0, 1.0, 0.0, 100.0};
  std::string s = detail::svg_open(title);
  s += detail::svg_axes(f, "scale factor", "violation rate (%)");
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const auto color = std::string(detail::kSeriesColors[i % std::size(detail::kSeriesColors)]);
    auto pts = sweeps[i].points;
    std::stable_sort(pts.begin(), pts.end(), [](const EvalSummary& a, const EvalSummary& b) { return a.scale < b.scale; });
    s += "<g class=\"series\" data-series=\"" + detail::xml_escape(sweeps[i].series) + "\">\n";
    std::string poly;
    for (const auto& p : pts) {
      if (!poly.empty()) poly += ' ';
      poly += detail::fixed(f.px(p.scale), 2) + "," + detail::fixed(f.py(p.violation_rate), 2);
    }
    s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
    for (const auto& p : pts) {
      s += "<circle class=\"marker\" fill=\"" + color + "\" cx=\"" + detail::fixed(f.px(p.scale), 2) + "\" cy=\"" +
           detail::fixed(f.py(p.violation_rate), 2) + "\" r=\"3.5\"><title>" +
           detail::xml_escape(sweep_row(p, sweeps[i].series)) + "</title></circle>\n";
    }
    s += "</g>\n";
    s += detail::svg_legend_item(static_cast<int>(i), color, sweeps[i].series, false);
  }
  s += "</svg>\n";
  return s;
}

struct ReportPaths {
  std::vector<std::filesystem::path> written;
};

/// Writes scatter.csv, scatter.svg and summary.json into `out_dir`, plus
/// sweep.csv and sweep.svg when sweeps are given.
inline ReportPaths write_report(const std::filesystem::path& out_dir, std::span<const BenchmarkEntry> bench,
                                std::span<const GenerationRecord> gens, std::span<const Verdict> verdicts,
                                std::span<const SweepResult> sweeps = {},
                                TiePolicy policy = TiePolicy::kHalfWin) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());
  ReportPaths out;
  const auto points = scatter_data(bench, gens);
  const auto summary = summarize(bench, gens, verdicts, policy);
  auto put = [&](const char* name, std::string_view bytes) {
    write_file_atomic(out_dir / name, bytes);
    out.written.push_back(out_dir / name);
  };
  put("scatter.csv", scatter_csv(points));
  put("scatter.svg", scatter_svg(points));
  Json doc = to_json(summary);
  doc["tie_policy"] = std::string(to_string(policy));
  put("summary.json", doc.dump(2) + "\n");
  if (!sweeps.empty()) {
    put("sweep.csv", sweep_csv(sweeps));
    put("sweep.svg", sweep_svg(sweeps));
  }
  return out;
}

}  // namespace lenlift

#endif  // LENLIFT_REPORT_HPP_

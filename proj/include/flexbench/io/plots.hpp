#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexbench/io/history_csv.hpp"
#include "flexbench/io/stats.hpp"

namespace flexbench {

// SVG subset emitted here: one <svg> root with width/height/viewBox, <rect>,
// <line>, <polyline> (points + stroke + fill="none"), <text> with x/y and
// font-size. No CSS, scripts or external references.

enum class AxisScale { Linear, Log, Symlog };

inline AxisScale parse_axis_scale(const std::string& s) {
  if (s == "linear") return AxisScale::Linear;
  if (s == "log") return AxisScale::Log;
  if (s == "symlog") return AxisScale::Symlog;
  throw std::invalid_argument("unknown axis scale '" + s + "'");
}

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

namespace detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

/// Maps data to [0,1]; symlog is linear within [-1,1] and logarithmic outside.
struct Axis {
  AxisScale scale = AxisScale::Linear;
  double lo = 0.0, hi = 1.0;

  static double fwd(AxisScale sc, double v) {
    switch (sc) {
      case AxisScale::Linear: return v;
      case AxisScale::Log: return std::log10(v);
      case AxisScale::Symlog: return std::copysign(std::log10(1.0 + std::abs(v)), v);
    }
    return v;
  }

  Axis(AxisScale sc, double min, double max) : scale(sc) {
    if (sc == AxisScale::Log && !(min > 0)) throw std::invalid_argument("log axis needs positive values");
    lo = fwd(sc, min);
    hi = fwd(sc, max);
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }

  double operator()(double v) const { return (fwd(scale, v) - lo) / (hi - lo); }
};

struct Frame {
  double w = 640, h = 400, left = 70, right = 130, top = 30, bottom = 50;
  double px(double u) const { return left + u * (w - left - right); }
  double py(double u) const { return h - bottom - u * (h - top - bottom); }
};

inline void svg_open(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h << "\" viewBox=\"0 0 "
      << f.w << ' ' << f.h << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << f.w << "\" height=\"" << f.h << "\" fill=\"white\"/>\n"
      << "<text x=\"" << f.left << "\" y=\"18\" font-size=\"14\">" << xml_escape(title) << "</text>\n"
      << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(0)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(0) << "\" y2=\"" << f.py(1)
      << "\" stroke=\"black\"/>\n";
}

inline void svg_label(std::ostream& out, double x, double y, const std::string& text, const char* anchor = "start") {
  out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"11\" text-anchor=\"" << anchor << "\">"
      << xml_escape(text) << "</text>\n";
}

inline void svg_legend(std::ostream& out, const Frame& f, std::size_t i, const std::string& name) {
  const double y = f.top + 16.0 * static_cast<double>(i);
  const double x = f.w - f.right + 10;
  out << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 20 << "\" y2=\"" << y << "\" stroke=\""
      << kPalette[i % 8] << "\" stroke-width=\"2\"/>\n";
  svg_label(out, x + 25, y + 4, name);
}

inline void svg_polyline(std::ostream& out, const std::vector<std::pair<double, double>>& pts, std::size_t i) {
  out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 8] << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) out << (k ? " " : "") << num(pts[k].first) << ',' << num(pts[k].second);
  out << "\"/>\n";
}

}  // namespace detail

/// Quantile levels 0.01 .. 0.99.
inline std::vector<double> percentile_levels() {
  std::vector<double> v;
  for (int i = 1; i <= 99; ++i) v.push_back(i / 100.0);
  return v;
}

/// Quantile plot: value on the horizontal axis, fraction below on the
/// vertical axis, drawn as a step curve through the 99 percentiles.
/// Companion CSV: series,level,value.
inline void emit_quantile_plot(const std::vector<NamedSeries>& series, AxisScale scale, const std::string& title,
                               std::ostream& svg, std::ostream& csv) {
  if (series.empty()) throw std::invalid_argument("quantile plot needs at least one series");
  const auto levels = percentile_levels();
  std::vector<std::vector<double>> q(series.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].values.empty()) throw std::invalid_argument("series '" + series[i].name + "' is empty");
    auto sorted = series[i].values;
    std::sort(sorted.begin(), sorted.end());
    for (double p : levels) q[i].push_back(quantile(sorted, p));
    lo = std::min(lo, q[i].front());
    hi = std::max(hi, q[i].back());
  }
  csv << "series,level,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t k = 0; k < levels.size(); ++k)
      csv << series[i].name << ',' << format_double(levels[k]) << ',' << format_double(q[i][k]) << '\n';

  const detail::Axis ax(scale, lo, hi);
  const detail::Frame f;
  detail::svg_open(svg, f, title);
  detail::svg_label(svg, f.px(0), f.py(0) + 16, detail::num(lo), "middle");
  detail::svg_label(svg, f.px(1), f.py(0) + 16, detail::num(hi), "middle");
  detail::svg_label(svg, f.px(0) - 6, f.py(0.01) + 4, "0.01", "end");
  detail::svg_label(svg, f.px(0) - 6, f.py(0.99) + 4, "0.99", "end");
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double x = f.px(ax(q[i][k]));
      if (k > 0) pts.emplace_back(x, f.py(levels[k - 1]));  // horizontal run, then the jump
      pts.emplace_back(x, f.py(levels[k]));
    }
    detail::svg_polyline(svg, pts, i);
    detail::svg_legend(svg, f, i, series[i].name);
  }
  svg << "</svg>\n";
}

struct HourlySeries {
  std::string name;
  std::vector<double> hourly;
};

/// Averages per-PTU values per hour (a trailing partial hour averages what it has).
inline std::vector<double> hourly_average(const std::vector<double>& per_ptu, int ptus_per_hour) {
  if (ptus_per_hour < 1) throw std::invalid_argument("ptus_per_hour must be positive");
  std::vector<double> out;
  for (std::size_t i = 0; i < per_ptu.size(); i += static_cast<std::size_t>(ptus_per_hour)) {
    const std::size_t end = std::min(per_ptu.size(), i + static_cast<std::size_t>(ptus_per_hour));
    double s = 0.0;
    for (std::size_t k = i; k < end; ++k) s += per_ptu[k];
    out.push_back(s / static_cast<double>(end - i));
  }
  return out;
}

/// Cost-to-go over time, one curve per series after hourly averaging.
/// Companion CSV: series,hour,value (hours x series rows).
inline std::vector<HourlySeries> emit_timeseries_plot(const std::vector<NamedSeries>& per_ptu, int ptus_per_hour,
                                                      const std::string& title, std::ostream& svg, std::ostream& csv) {
  if (per_ptu.empty()) throw std::invalid_argument("timeseries plot needs at least one series");
  std::vector<HourlySeries> hs;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t hours = 0;
  for (const auto& s : per_ptu) {
    hs.push_back({s.name, hourly_average(s.values, ptus_per_hour)});
    for (double v : hs.back().hourly) lo = std::min(lo, v), hi = std::max(hi, v);
    hours = std::max(hours, hs.back().hourly.size());
  }
  csv << "series,hour,value\n";
  for (const auto& s : hs)
    for (std::size_t h = 0; h < s.hourly.size(); ++h) csv << s.name << ',' << h << ',' << format_double(s.hourly[h]) << '\n';
  if (hours == 0) lo = 0.0, hi = 1.0;

  const detail::Axis ay(AxisScale::Linear, lo, hi);
  const double span = hours > 1 ? static_cast<double>(hours - 1) : 1.0;
  const detail::Frame f;
  detail::svg_open(svg, f, title);
  detail::svg_label(svg, f.px(0) - 6, f.py(0) + 4, detail::num(lo), "end");
  detail::svg_label(svg, f.px(0) - 6, f.py(1) + 4, detail::num(hi), "end");
  detail::svg_label(svg, f.px(0), f.py(0) + 16, "0 h", "middle");
  detail::svg_label(svg, f.px(1), f.py(0) + 16, std::to_string(hours ? hours - 1 : 0) + " h", "middle");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t h = 0; h < hs[i].hourly.size(); ++h)
      pts.emplace_back(f.px(static_cast<double>(h) / span), f.py(ay(hs[i].hourly[h])));
    detail::svg_polyline(svg, pts, i);
    detail::svg_legend(svg, f, i, hs[i].name);
  }
  svg << "</svg>\n";
  return hs;
}

}  // namespace flexbench

#include "bohrlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bohrlab/errors.hpp"

namespace bohrlab {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 50, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
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

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double from, double to) const {
    const double x = log ? std::log10(v) : v;
    return from + (x - lo) / (hi - lo) * (to - from);
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }

Axis make_axis(const std::vector<std::vector<double>>& series, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s)
      if (usable(v, log)) {
        const double x = log ? std::log10(v) : v;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad, log};
}

}  // namespace

std::string plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::line: return "line";
    case PlotKind::scatter: return "scatter";
    case PlotKind::loglog: return "loglog";
  }
  return "line";
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "line") return PlotKind::line;
  if (name == "scatter") return PlotKind::scatter;
  if (name == "loglog") return PlotKind::loglog;
  throw ValidationError("unknown plot kind '" + name + "'");
}

std::string render_svg(const DataTable& table, const PlotSpec& spec, const std::string& digest) {
  require(!table.empty(), "plot: table '" + table.name + "' is empty");
  require(!spec.y.empty(), "plot: no y columns");
  const bool log = spec.kind == PlotKind::loglog;
  const auto xs = table.numeric_column(spec.x);
  std::vector<std::vector<double>> ys;
  for (const auto& c : spec.y) ys.push_back(table.numeric_column(c));

  const Axis ax = make_axis({xs}, log);
  const Axis ay = make_axis(ys, log);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", kWidth, kHeight);
  svg += fmt::format("<metadata>config-digest: {}</metadata>\n", escape(digest));
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n", kLeft,
                     escape(spec.title.empty() ? table.name : spec.title));
  if (!spec.annotation.empty())
    svg += fmt::format("<text x=\"{}\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">{}</text>\n",
                       kLeft, escape(spec.annotation));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#222\"/>\n", x0, y1,
                     x1 - x0, y0 - y1);

  for (int i = 0; i <= 4; ++i) {
    const double fx = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    const double px = x0 + (x1 - x0) * i / 4.0;
    const double py = y0 + (y1 - y0) * i / 4.0;
    const double vx = log ? std::pow(10.0, fx) : fx;
    const double vy = log ? std::pow(10.0, fy) : fy;
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", px, y0, y1);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#ddd\"/>\n", x0, py, x1);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n",
                       px, y0 + 15, vx);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
                       x0 - 5, py + 3, vy);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     (x0 + x1) / 2, kHeight - 12, escape(spec.x));

  for (std::size_t s = 0; s < ys.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(xs[i], log) || !usable(ys[s][i], log)) continue;
      const double px = ax.map(xs[i], x0, x1);
      const double py = ay.map(ys[s][i], y0, y1);
      if (spec.kind == PlotKind::scatter) {
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px, py, colour);
      } else {
        points += fmt::format("{:.2f},{:.2f} ", px, py);
      }
    }
    if (!points.empty()) {
      points.pop_back();
      svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, points);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\" text-anchor=\"end\">{}</text>\n",
                       x1 - 6, y1 + 14 + 13 * static_cast<double>(s), colour, escape(spec.y[s]));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace bohrlab

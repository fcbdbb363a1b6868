#pragma once

#include <string>
#include <vector>

#include "bohrlab/io.hpp"

namespace bohrlab {

enum class PlotKind { line, scatter, loglog };

std::string plot_kind_name(PlotKind kind);
PlotKind parse_plot_kind(const std::string& name);

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  PlotKind kind = PlotKind::line;
  std::string title;
  std::string annotation;  ///< free text under the title, e.g. a fitted slope
};

/// Standalone SVG document. Throws ValidationError for an empty table or unknown column.
std::string render_svg(const DataTable& table, const PlotSpec& spec, const std::string& digest);

}  // namespace bohrlab

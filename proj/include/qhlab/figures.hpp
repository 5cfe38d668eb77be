#pragma once

// Figure and table output: SVG polylines drawn over the domain outline, and
// CSV tables for envelopes and level series.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qhlab/curve.hpp"
#include "qhlab/domain.hpp"

namespace qhlab {

enum class FigureFormat { kSvg, kCsv };

/// "svg" or "csv" (case-sensitive); invalid-parameter otherwise.
FigureFormat parse_figure_format(std::string_view name);
/// Format from a file extension; invalid-parameter for anything else.
FigureFormat format_from_path(std::string_view path);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string render_csv(const Table& table);
std::string render_svg(const Domain& domain, const std::vector<std::vector<Vec2>>& polylines);

/// One row per vertex: curve, index, x, y, d, k, delta.
Table curve_table(const std::vector<ParametrizedCurve>& curves);

void write_text(const std::string& path, const std::string& text);
/// Curves as SVG polylines or as a vertex table.
void emit_figure(const std::string& path, const Domain& domain, const std::vector<ParametrizedCurve>& curves,
                 FigureFormat format);
/// Tables only have a CSV form.
void emit_table(const std::string& path, const Table& table, FigureFormat format);

}  // namespace qhlab

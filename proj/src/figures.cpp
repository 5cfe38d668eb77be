#include "qhlab/figures.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qhlab/error.hpp"

namespace qhlab {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

FigureFormat parse_figure_format(std::string_view name) {
  if (name == "svg") return FigureFormat::kSvg;
  if (name == "csv") return FigureFormat::kCsv;
  throw Error(ErrorCode::kInvalidParameter, "unsupported figure format '" + std::string(name) + "'");
}

FigureFormat format_from_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot == std::string_view::npos) throw Error(ErrorCode::kInvalidParameter, "output path has no extension");
  return parse_figure_format(path.substr(dot + 1));
}

std::string render_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << csv_escape(table.header[i]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const auto* d = std::get_if<double>(&row[i])) {
        out << format_number(*d);
      } else if (const auto* n = std::get_if<long long>(&row[i])) {
        out << *n;
      } else {
        out << csv_escape(std::get<std::string>(row[i]));
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_svg(const Domain& domain, const std::vector<std::vector<Vec2>>& polylines) {
  const BoundingBox& box = domain.bounding_box();
  const double pad = 0.02 * domain.diameter();
  // Flip y so the picture has the usual orientation.
  const auto px = [&](Vec2 p) { return svg_number(p.x) + "," + svg_number(box.y_max + box.y_min - p.y); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_number(box.x_min - pad) << ' '
      << svg_number(box.y_min - pad) << ' ' << svg_number(box.width() + 2 * pad) << ' '
      << svg_number(box.height() + 2 * pad) << "\">\n";
  const double stroke = 0.003 * domain.diameter();
  out << "<g class=\"outline\" fill=\"none\" stroke=\"black\" stroke-width=\"" << svg_number(stroke) << "\">\n";
  for (const auto& prim : domain.primitives()) {
    if (prim.kind == BoundaryPrimitive::Kind::kSegment) {
      if (prim.length() == 0.0) continue;
      out << "<path d=\"M " << px(prim.a) << " L " << px(prim.b) << "\"/>\n";
    } else {
      // Arcs as fine polylines; an SVG arc command cannot draw a full circle.
      const int steps = std::max(8, static_cast<int>(prim.sweep / (2 * std::numbers::pi) * 256));
      out << "<path d=\"M " << px(prim.point_at(0.0));
      for (int i = 1; i <= steps; ++i) out << " L " << px(prim.point_at(prim.length() * i / steps));
      out << "\"/>\n";
    }
  }
  out << "</g>\n";
  out << "<g class=\"curves\" fill=\"none\" stroke=\"#c03020\" stroke-width=\"" << svg_number(stroke) << "\">\n";
  for (const auto& line : polylines) {
    out << "<polyline points=\"";
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " " : "") << px(line[i]);
    out << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

Table curve_table(const std::vector<ParametrizedCurve>& curves) {
  Table table{{"curve", "index", "x", "y", "d", "k", "delta"}, {}};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    for (std::size_t i = 0; i < curve.size(); ++i) {
      table.rows.push_back({static_cast<long long>(c), static_cast<long long>(i), curve.vertices()[i].x,
                            curve.vertices()[i].y, curve.d_table()[i], curve.k_table()[i], curve.deltas()[i]});
    }
  }
  return table;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidParameter, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kInternal, "failed writing '" + path + "'");
}

void emit_figure(const std::string& path, const Domain& domain, const std::vector<ParametrizedCurve>& curves,
                 FigureFormat format) {
  if (format == FigureFormat::kCsv) {
    write_text(path, render_csv(curve_table(curves)));
    return;
  }
  std::vector<std::vector<Vec2>> lines;
  for (const auto& c : curves) lines.emplace_back(c.vertices().begin(), c.vertices().end());
  write_text(path, render_svg(domain, lines));
}

void emit_table(const std::string& path, const Table& table, FigureFormat format) {
  if (format != FigureFormat::kCsv) throw Error(ErrorCode::kInvalidParameter, "tables can only be written as csv");
  write_text(path, render_csv(table));
}

}  // namespace qhlab

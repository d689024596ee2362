#pragma once

#include <string>
#include <vector>

namespace paraboloid::cli {

enum class PlotKind { loglog, profile };

PlotKind parse_plot_kind(const std::string& name);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int column(const std::string& name) const;
};

// Comma-separated with a header line; no quoting. Throws DomainError when the
// file is unreadable, has no data rows, or has ragged rows.
CsvTable read_csv(const std::string& path);

// Renders a CSV as a self-contained SVG string. loglog needs columns N and
// value; rows are grouped into series by the n, p and source columns when
// present, and each series gets a dashed reference line of slope `target`
// (or -(n+1)(2/p - 1) from n and p). profile plots column y against column x
// (defaults: the first two all-numeric columns). Output depends only on the
// table, so equal input renders byte-identical SVG.
std::string render_plot(const CsvTable& table, PlotKind kind, const std::string& x_column = "",
                        const std::string& y_column = "");

// read_csv + render_plot, then writes svg_path. Nothing is written on error.
void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path,
               const std::string& x_column = "", const std::string& y_column = "");

}  // namespace paraboloid::cli

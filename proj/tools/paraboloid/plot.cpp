#include "paraboloid/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "paraboloid/errors.hpp"

namespace paraboloid::cli {
namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 30, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

double number_at(const CsvTable& t, std::size_t row, int col) {
  double v = 0;
  if (!parse_number(t.rows[row][static_cast<std::size_t>(col)], v)) {
    throw DomainError("malformed CSV: column '" + t.header[static_cast<std::size_t>(col)] + "' row " +
                      std::to_string(row + 1) + " is not a number");
  }
  return v;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool has_reference = false;
  double slope = 0.0;
};

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame frame_of(const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  const auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  };
  pad(x0, x1);
  pad(y0, y1);
  return {x0, x1, y0, y1};
}

std::string render(const std::vector<Series>& series, bool logarithmic, const std::string& xlabel,
                   const std::string& ylabel) {
  const Frame f = frame_of(series);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom) << "\"/></g>\n";

  const auto label = [&](double v) { return tick(logarithmic ? std::exp(v) : v); };
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    svg << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\"" << num(f.px(x))
        << "\" y2=\"" << num(kHeight - kBottom + 4) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\">" << label(x) << "</text>\n";
    svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(f.py(y)) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << label(y)
        << "</text>\n";
  }
  svg << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  svg << "<text transform=\"translate(16," << num((kTop + kHeight - kBottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";

  svg << "<clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom) << "\"/></clipPath>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    svg << "<g clip-path=\"url(#plot)\">";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      svg << (j ? " " : "") << num(f.px(s.points[j].first)) << ',' << num(f.py(s.points[j].second));
    }
    svg << "\"/>";
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << num(f.px(x)) << "\" cy=\"" << num(f.py(y)) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>";
    }
    if (s.has_reference) {
      // Through the centroid of the series with the reference slope.
      double mx = 0, my = 0;
      for (const auto& [x, y] : s.points) {
        mx += x;
        my += y;
      }
      mx /= static_cast<double>(s.points.size());
      my /= static_cast<double>(s.points.size());
      svg << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(my + s.slope * (f.x0 - mx))) << "\" x2=\""
          << num(f.px(f.x1)) << "\" y2=\"" << num(f.py(my + s.slope * (f.x1 - mx))) << "\" stroke=\"" << color
          << "\" stroke-dasharray=\"6,4\"/>";
    }
    svg << "</g>\n";
    const double ly = kTop + 14 + 30.0 * static_cast<double>(i);
    svg << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>";
    svg << "<text x=\"" << num(kWidth - kRight + 34) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
    if (s.has_reference) {
      svg << "<text x=\"" << num(kWidth - kRight + 34) << "\" y=\"" << num(ly + 17) << "\">ref slope "
          << tick(s.slope) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<Series> loglog_series(const CsvTable& t) {
  const int cN = t.column("N");
  const int cv = t.column("value");
  if (cN < 0 || cv < 0) throw DomainError("malformed CSV: loglog plots need columns N and value");
  const int cn = t.column("n"), cp = t.column("p"), cs = t.column("source"), ct = t.column("target");

  std::map<std::string, Series> groups;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::string key;
    if (cn >= 0) key += "n=" + t.rows[i][static_cast<std::size_t>(cn)] + " ";
    if (cp >= 0) key += "p=" + t.rows[i][static_cast<std::size_t>(cp)] + " ";
    if (cs >= 0) key += t.rows[i][static_cast<std::size_t>(cs)];
    if (key.empty()) key = "value";
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) {
      order.push_back(key);
      it->second.label = key;
      if (ct >= 0) {
        it->second.has_reference = true;
        it->second.slope = number_at(t, i, ct);
      } else if (cn >= 0 && cp >= 0) {
        it->second.has_reference = true;
        it->second.slope = -(number_at(t, i, cn) + 1.0) * (2.0 / number_at(t, i, cp) - 1.0);
      }
    }
    const double x = number_at(t, i, cN), y = number_at(t, i, cv);
    if (!(x > 0) || !(y > 0)) throw DomainError("malformed CSV: loglog plots need positive N and value");
    it->second.points.emplace_back(std::log(x), std::log(y));
  }
  std::vector<Series> out;
  for (const auto& key : order) {
    auto s = groups[key];
    std::sort(s.points.begin(), s.points.end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "loglog") return PlotKind::loglog;
  if (name == "profile") return PlotKind::profile;
  throw DomainError("unknown plot kind '" + name + "' (loglog, profile)");
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read CSV '" + path + "'");
  const auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DomainError("malformed CSV: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.rows.empty()) throw DomainError("CSV '" + path + "' has no data rows");
  return t;
}

std::string render_plot(const CsvTable& table, PlotKind kind, const std::string& x_column,
                        const std::string& y_column) {
  if (table.rows.empty()) throw DomainError("CSV has no data rows");
  if (kind == PlotKind::loglog) return render(loglog_series(table), true, "N", "value");

  std::vector<int> numeric;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    double v = 0;
    const bool all = std::all_of(table.rows.begin(), table.rows.end(),
                                 [&](const auto& row) { return parse_number(row[c], v); });
    if (all) numeric.push_back(static_cast<int>(c));
  }
  const auto pick = [&](const std::string& name, std::size_t fallback) {
    if (!name.empty()) {
      const int c = table.column(name);
      if (c < 0) throw DomainError("malformed CSV: no column '" + name + "'");
      return c;
    }
    if (numeric.size() <= fallback) throw DomainError("malformed CSV: profile plots need two numeric columns");
    return numeric[fallback];
  };
  const int cx = pick(x_column, 0);
  const int cy = pick(y_column, x_column.empty() ? 1 : 0);
  Series s;
  s.label = table.header[static_cast<std::size_t>(cy)];
  for (std::size_t i = 0; i < table.rows.size(); ++i) s.points.emplace_back(number_at(table, i, cx), number_at(table, i, cy));
  std::stable_sort(s.points.begin(), s.points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return render({s}, false, table.header[static_cast<std::size_t>(cx)], s.label);
}

void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path, const std::string& x_column,
               const std::string& y_column) {
  const std::string svg = render_plot(read_csv(csv_path), kind, x_column, y_column);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + svg_path + "'");
  out << svg;
}

}  // namespace paraboloid::cli

#include <pdcli/output.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace pdcli {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

namespace {

std::string xml_escape(const std::string& s) {
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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void write_svg(std::ostream& out, const CsvTable& table, const SvgOptions& opts) {
  constexpr double W = 800, H = 600;
  constexpr double left = 80, right = 600, top = 50, bottom = 540;

  std::vector<std::string> cols = opts.columns;
  if (cols.empty()) {
    for (const auto& c : table.columns)
      if (c != "n") cols.push_back(c);
  }
  std::vector<std::size_t> idx;
  for (const auto& c : cols) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), c);
    if (it == table.columns.end())
      throw std::invalid_argument("svg: unknown column '" + c + "'");
    idx.push_back(static_cast<std::size_t>(it - table.columns.begin()));
  }

  double n_lo = 0, n_hi = 1;
  if (!table.rows.empty()) {
    n_lo = table.rows.front()[0];
    n_hi = std::max(table.rows.back()[0], n_lo + 1);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    for (std::size_t k : idx) {
      const double v = row[k];
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
  }
  if (!(lo <= hi)) {
    lo = -1;
    hi = 1;
  }
  double d_lo = std::floor(lo), d_hi = std::ceil(hi);
  if (d_lo == d_hi) {
    d_lo -= 1;
    d_hi += 1;
  }
  auto px = [&](double n) { return left + (n - n_lo) / (n_hi - n_lo) * (right - left); };
  auto py = [&](double lv) { return bottom - (lv - d_lo) / (d_hi - d_lo) * (bottom - top); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    out << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(opts.title)
        << "</text>\n";
  }

  const int decades = static_cast<int>(d_hi - d_lo);
  const int label_every = std::max(1, decades / 12);
  out << "<g class=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int d = 0; d <= decades; ++d) {
    const double y = py(d_lo + d);
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(right) << "\" y2=\"" << fmt(y) << "\"/>\n";
  }
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
  for (int d = 0; d <= decades; d += label_every) {
    out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(d_lo + d) + 4)
        << "\">1e" << static_cast<int>(d_lo + d) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(right - left) << "\" height=\"" << fmt(bottom - top)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text class=\"log-axis\" x=\"20\" y=\"" << fmt((top + bottom) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 20 "
      << fmt((top + bottom) / 2) << ")\" text-anchor=\"middle\">value (log10 scale)</text>\n";
  out << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 40)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">n</text>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(bottom + 18) << "\">"
      << format_number(n_lo) << "</text>\n"
      << "<text x=\"" << fmt(right) << "\" y=\"" << fmt(bottom + 18)
      << "\" text-anchor=\"end\">" << format_number(n_hi) << "</text>\n</g>\n";

  for (std::size_t c = 0; c < idx.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    out << "<polyline data-column=\"" << xml_escape(cols[c]) << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& row : table.rows) {
      const double v = row[idx[c]];
      if (!std::isfinite(v) || v <= 0) continue;
      out << (first ? "" : " ") << fmt(px(row[0])) << ',' << fmt(py(std::log10(v)));
      first = false;
    }
    out << "\"/>\n";
    const double ly = top + 10 + 20.0 * c;
    out << "<line x1=\"615\" y1=\"" << fmt(ly) << "\" x2=\"645\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"652\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(cols[c])
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace pdcli

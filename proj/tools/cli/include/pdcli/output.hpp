#pragma once

#include <pdcli/experiment.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace pdcli {

/// Comma-separated, LF line endings, header row, 17 significant digits.
void write_csv(std::ostream& out, const CsvTable& table);
std::string format_number(double v);

struct SvgOptions {
  std::string title;
  std::vector<std::string> columns;  // empty: every column except "n"
};

/// Log-scale line chart of the selected columns against n. Non-positive
/// and non-finite samples are skipped.
void write_svg(std::ostream& out, const CsvTable& table, const SvgOptions& opts);

}  // namespace pdcli

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace slitlab::io {

/// Shortest round-trip-safe decimal rendering used in all CSV cells.
std::string fmt(double v);

/// Atomic write-then-rename of a whole file.
void write_text(const std::string& path, const std::string& content);

/// CSV with a mandatory header row; cells are preformatted strings so a
/// column can be left empty.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::string> cells(const std::vector<double>& values);

/// Native SVG polyline chart; one polyline per series, a frame, and
/// min/max tick labels.  A convenience view of the CSV record.
struct Series {
  std::vector<double> x, y;
  std::string label;
};

void write_svg_lines(const std::string& path,
                     const std::vector<Series>& series,
                     const std::string& title);

/// key=value manifest echoing the effective configuration.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace slitlab::io

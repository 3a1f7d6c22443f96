#include <slitlab/io.hpp>

#include <slitlab/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace slitlab::io {

std::string fmt(double v) {
  char buf[40];
  for (int prec = 12; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open for writing: " + tmp);
    os << content;
    if (!os) throw ConfigError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ConfigError("rename failed: " + path);
  }
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (header.empty()) throw ConfigError("write_csv: empty header");
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("write_csv: row width mismatch");
    for (size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? ',' : '\n');
  }
  write_text(path, os.str());
}

std::vector<std::string> cells(const std::vector<double>& values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(fmt(v));
  return out;
}

void write_svg_lines(const std::string& path,
                     const std::vector<Series>& series,
                     const std::string& title) {
  const int W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin <= xmax) || !(ymin <= ymax))
    throw ConfigError("write_svg_lines: no data");
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto px = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto py = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
     << "\" height=\"" << H - MT - MB
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << title << "</text>\n";
  os << "<text x=\"" << ML << "\" y=\"" << H - MB + 18 << "\" font-size=\"11\">"
     << fmt(xmin) << "</text>\n";
  os << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 18
     << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(xmax) << "</text>\n";
  os << "<text x=\"" << ML - 6 << "\" y=\"" << H - MB
     << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymin) << "</text>\n";
  os << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 10
     << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax) << "</text>\n";
  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    os << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
       << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    os << "\"/>\n";
    if (!s.label.empty())
      os << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 16 + 14 * si
         << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[si % 6]
         << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

void write_manifest(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
  write_text(path, os.str());
}

}  // namespace slitlab::io

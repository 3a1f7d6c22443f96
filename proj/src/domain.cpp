#include <slitlab/domain.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace slitlab {

namespace {

Bc parse_bc(const std::string& s) {
  if (s == "dirichlet" || s == "D" || s == "d") return Bc::Dirichlet;
  if (s == "neumann" || s == "N" || s == "n") return Bc::Neumann;
  throw ConfigError("unknown boundary condition '" + s + "'");
}

double parse_num(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + s + "'");
  }
}

int edge_index(const std::string& s) {
  if (s == "left") return 0;
  if (s == "right") return 1;
  if (s == "bottom") return 2;
  if (s == "top") return 3;
  throw ConfigError("unknown edge '" + s + "'");
}

const char* edge_name(int e) {
  static const char* names[4] = {"left", "right", "bottom", "top"};
  return names[e];
}

}  // namespace

void DomainSpec::validate() const {
  if (chart_radius_r0 <= 0.0) throw ConfigError("chart_r0 must be positive");
  const double r0 = chart_radius_r0;
  for (size_t i = 0; i < slits.size(); ++i) {
    const SlitSpec& s = slits[i];
    if (s.half_length_t <= 0.0)
      throw ConfigError("slit half length must be positive");
    if (s.half_length_t >= r0)
      throw ConfigError("slit half length must stay below the chart radius");
    // B(center, 2 r0) inside the outer boundary.
    if (kind == OuterKind::Rectangle) {
      const double cl = std::min({s.center.x, a - s.center.x, s.center.y,
                                  b - s.center.y});
      if (cl < 2.0 * r0)
        throw ConfigError("slit chart ball B(center, 2 r0) leaves the rectangle");
    }
    for (size_t j = i + 1; j < slits.size(); ++j) {
      const SlitSpec& o = slits[j];
      const double d = std::hypot(s.center.x - o.center.x,
                                  s.center.y - o.center.y);
      if (d <= s.half_length_t + o.half_length_t)
        throw ConfigError("slits overlap");
    }
  }
  if (kind == OuterKind::ConfocalEllipse) {
    if (x0 <= 0.0) throw ConfigError("outer.x0 must be positive");
    if (slits.size() != 1)
      throw ConfigError("a confocal-ellipse domain carries exactly one slit");
  }
}

Bc DomainSpec::edge_bc(int edge, double coord) const {
  constexpr double eps = 1e-9;
  bool covered = false, dirichlet = false;
  for (const EdgeSegment& s : edge_segments) {
    if (s.edge != edge) continue;
    if (coord < s.lo - eps || coord > s.hi + eps) continue;
    covered = true;
    if (s.bc == Bc::Dirichlet) dirichlet = true;
  }
  if (!covered) return outer_bc[edge];
  return dirichlet ? Bc::Dirichlet : Bc::Neumann;
}

DomainSpec parse_domain(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  DomainSpec spec;
  spec.outer_bc[0] = spec.outer_bc[1] = spec.outer_bc[2] = spec.outer_bc[3] =
      Bc::Dirichlet;
  std::map<int, SlitSpec> slits;
  std::map<int, EdgeSegment> segs;
  for (const auto& [key, val] : kv) {
    if (key == "outer.kind") {
      if (val == "rectangle")
        spec.kind = OuterKind::Rectangle;
      else if (val == "ellipse")
        spec.kind = OuterKind::ConfocalEllipse;
      else
        throw ConfigError("unknown outer.kind '" + val + "'");
    } else if (key == "outer.a") {
      spec.a = parse_num(key, val);
    } else if (key == "outer.b") {
      spec.b = parse_num(key, val);
    } else if (key == "outer.x0") {
      spec.x0 = parse_num(key, val);
    } else if (key == "chart_r0") {
      spec.chart_radius_r0 = parse_num(key, val);
    } else if (key == "outer_bc.all") {
      const Bc bc = parse_bc(val);
      for (int e = 0; e < 4; ++e) spec.outer_bc[e] = bc;
    } else if (key.rfind("outer_bc.", 0) == 0) {
      spec.outer_bc[edge_index(key.substr(9))] = parse_bc(val);
    } else if (key.rfind("slit.", 0) == 0 || key.rfind("seg.", 0) == 0) {
      const bool is_slit = key[1] == 'l';
      const size_t p0 = key.find('.') + 1;
      const size_t p1 = key.find('.', p0);
      if (p1 == std::string::npos) throw ConfigError("bad key '" + key + "'");
      const int id = static_cast<int>(parse_num(key, key.substr(p0, p1 - p0)));
      const std::string field = key.substr(p1 + 1);
      if (is_slit) {
        SlitSpec& s = slits[id];
        if (field == "cx") s.center.x = parse_num(key, val);
        else if (field == "cy") s.center.y = parse_num(key, val);
        else if (field == "angle") s.angle = parse_num(key, val);
        else if (field == "t") s.half_length_t = parse_num(key, val);
        else if (field == "bc") s.condition = parse_bc(val);
        else throw ConfigError("unknown slit field '" + field + "'");
      } else {
        EdgeSegment& s = segs[id];
        if (field == "edge") s.edge = edge_index(val);
        else if (field == "lo") s.lo = parse_num(key, val);
        else if (field == "hi") s.hi = parse_num(key, val);
        else if (field == "bc") s.bc = parse_bc(val);
        else throw ConfigError("unknown seg field '" + field + "'");
      }
    } else {
      throw ConfigError("unknown domain key '" + key + "'");
    }
  }
  for (auto& [id, s] : slits) spec.slits.push_back(s);
  for (auto& [id, s] : segs) spec.edge_segments.push_back(s);
  spec.validate();
  return spec;
}

DomainSpec load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open domain file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    // trim
    const size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed line in " + path + ": '" + line + "'");
    auto strip = [](std::string s) {
      const size_t b2 = s.find_first_not_of(" \t");
      const size_t e2 = s.find_last_not_of(" \t");
      return b2 == std::string::npos ? std::string()
                                     : s.substr(b2, e2 - b2 + 1);
    };
    kv.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return parse_domain(kv);
}

void save_domain(const DomainSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write domain file '" + path + "'");
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "outer.kind="
      << (spec.kind == OuterKind::Rectangle ? "rectangle" : "ellipse") << "\n";
  if (spec.kind == OuterKind::Rectangle) {
    out << "outer.a=" << num(spec.a) << "\nouter.b=" << num(spec.b) << "\n";
    for (int e = 0; e < 4; ++e)
      out << "outer_bc." << edge_name(e) << "=" << to_string(spec.outer_bc[e])
          << "\n";
  } else {
    out << "outer.x0=" << num(spec.x0) << "\n";
    out << "outer_bc.all=" << to_string(spec.outer_bc[0]) << "\n";
  }
  out << "chart_r0=" << num(spec.chart_radius_r0) << "\n";
  for (size_t i = 0; i < spec.slits.size(); ++i) {
    const SlitSpec& s = spec.slits[i];
    out << "slit." << i << ".cx=" << num(s.center.x) << "\n"
        << "slit." << i << ".cy=" << num(s.center.y) << "\n"
        << "slit." << i << ".angle=" << num(s.angle) << "\n"
        << "slit." << i << ".t=" << num(s.half_length_t) << "\n"
        << "slit." << i << ".bc=" << to_string(s.condition) << "\n";
  }
  for (size_t i = 0; i < spec.edge_segments.size(); ++i) {
    const EdgeSegment& s = spec.edge_segments[i];
    out << "seg." << i << ".edge=" << edge_name(s.edge) << "\n"
        << "seg." << i << ".lo=" << num(s.lo) << "\n"
        << "seg." << i << ".hi=" << num(s.hi) << "\n"
        << "seg." << i << ".bc=" << to_string(s.bc) << "\n";
  }
}

}  // namespace slitlab

#include <slitlab/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

namespace slitlab::mesh {

using geometry::SlitSide;

namespace {

constexpr double kSnapTol = 1e-9;

void push_cell(std::vector<std::array<int, 3>>& tris, int n00, int n10,
               int n11, int n01, bool slash) {
  if (slash) {  // diagonal from lower-left to upper-right
    tris.push_back({n00, n10, n11});
    tris.push_back({n00, n11, n01});
  } else {  // diagonal from lower-right to upper-left
    tris.push_back({n00, n10, n01});
    tris.push_back({n10, n11, n01});
  }
}

MeshTemplate build_rectangle(const DomainSpec& spec, int res, DiagMode diag) {
  MeshTemplate tmpl;
  tmpl.spec = spec;
  tmpl.resolution = res;
  const int nx = std::max(1, int(std::lround(spec.a * res)));
  const int ny = std::max(1, int(std::lround(spec.b * res)));
  const double hx = spec.a / nx, hy = spec.b / ny;

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  tmpl.ref_nodes.resize((nx + 1) * (ny + 1));
  tmpl.tags.resize(tmpl.ref_nodes.size());
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      tmpl.ref_nodes[id(i, j)] = {i * hx, j * hy};
      NodeTag& tag = tmpl.tags[id(i, j)];
      if (i == 0) tag.edge_mask |= 1u << 0;
      if (i == nx) tag.edge_mask |= 1u << 1;
      if (j == 0) tag.edge_mask |= 1u << 2;
      if (j == ny) tag.edge_mask |= 1u << 3;
    }

  for (int j = 0; j < ny; ++j) {
    const double yc = (j + 0.5) * hy;
    const bool slash = diag == DiagMode::Slash || yc < 0.5 * spec.b;
    for (int i = 0; i < nx; ++i)
      push_cell(tmpl.triangles, id(i, j), id(i + 1, j), id(i + 1, j + 1),
                id(i, j + 1), slash);
  }

  // snap each slit to grid lines, duplicate its interior nodes, and hand the
  // triangles above the slit line to the duplicates
  for (size_t s = 0; s < spec.slits.size(); ++s) {
    SlitSpec& slit = tmpl.spec.slits[s];
    if (std::abs(slit.angle) > kSnapTol)
      throw ConfigError("rectangle meshes support horizontal slits only");
    const int jy = int(std::lround(slit.center.y / hy));
    const int i_lo = int(std::lround((slit.center.x - slit.half_length_t) / hx));
    const int i_hi = int(std::lround((slit.center.x + slit.half_length_t) / hx));
    if (jy <= 0 || jy >= ny || i_lo < 1 || i_hi > nx - 1 || i_hi - i_lo < 2)
      throw ConfigError("slit does not fit on interior grid lines at this "
                        "resolution");
    slit.center = {0.5 * (i_lo + i_hi) * hx, jy * hy};
    slit.half_length_t = 0.5 * (i_hi - i_lo) * hx;

    tmpl.tip_nodes.push_back(id(i_lo, jy));
    tmpl.tip_nodes.push_back(id(i_hi, jy));
    tmpl.tags[id(i_lo, jy)] = {0, int(s), SlitSide::Tip};
    tmpl.tags[id(i_hi, jy)] = {0, int(s), SlitSide::Tip};

    std::map<int, int> dup;  // base id -> upper duplicate id
    for (int i = i_lo + 1; i < i_hi; ++i) {
      const int base = id(i, jy);
      const int up = int(tmpl.ref_nodes.size());
      tmpl.ref_nodes.push_back(tmpl.ref_nodes[base]);
      tmpl.tags[base] = {0, int(s), SlitSide::Bottom};
      tmpl.tags.push_back({0, int(s), SlitSide::Top});
      tmpl.seam_pairs.emplace_back(base, up);
      dup[base] = up;
    }
    const double y_line = jy * hy;
    for (auto& tri : tmpl.triangles) {
      const double cy = (tmpl.ref_nodes[tri[0]].y + tmpl.ref_nodes[tri[1]].y +
                         tmpl.ref_nodes[tri[2]].y) / 3.0;
      if (cy <= y_line) continue;
      for (int& v : tri) {
        auto it = dup.find(v);
        if (it != dup.end()) v = it->second;
      }
    }
  }
  return tmpl;
}

MeshTemplate build_ellipse(const DomainSpec& spec, int res) {
  const SlitSpec& slit = spec.slits.at(0);
  if (std::abs(slit.center.x) > kSnapTol || std::abs(slit.center.y) > kSnapTol ||
      std::abs(slit.angle) > kSnapTol)
    throw ConfigError("confocal-ellipse meshes need the slit centered at the "
                      "origin along the x axis");
  const double t_ref = slit.half_length_t;
  const double r_outer = t_ref * std::sinh(spec.x0);
  if (r_outer < 2.0 * spec.chart_radius_r0)
    throw ConfigError("outer boundary inside the motion zone: need "
                      "t sinh(x0) >= 2 r0");

  MeshTemplate tmpl;
  tmpl.spec = spec;
  tmpl.resolution = res;
  const int nx = std::max(8, int(std::ceil(r_outer * res)));
  const int nth = 2 * std::max(8, int(std::ceil(
                          std::numbers::pi * r_outer * res / 2.0)));
  auto id = [nth](int i, int j) { return i * nth + (j % nth); };
  tmpl.ref_nodes.resize((nx + 1) * nth);
  tmpl.tags.resize(tmpl.ref_nodes.size());
  for (int i = 0; i <= nx; ++i) {
    const double x = spec.x0 * i / nx;
    for (int j = 0; j < nth; ++j) {
      const double th = 2.0 * std::numbers::pi * j / nth;
      tmpl.ref_nodes[id(i, j)] = {t_ref * std::cosh(x) * std::cos(th),
                                  t_ref * std::sinh(x) * std::sin(th)};
      if (i == nx) tmpl.tags[id(i, j)].edge_mask |= 1u;
    }
  }
  // the x = 0 ring is the two-sided slit: theta and 2pi - theta coincide
  tmpl.tags[id(0, 0)] = {0, 0, SlitSide::Tip};
  tmpl.tags[id(0, nth / 2)] = {0, 0, SlitSide::Tip};
  tmpl.tip_nodes = {id(0, 0), id(0, nth / 2)};
  for (int j = 1; j < nth / 2; ++j) {
    tmpl.tags[id(0, j)] = {0, 0, SlitSide::Top};
    tmpl.tags[id(0, nth - j)] = {0, 0, SlitSide::Bottom};
    tmpl.seam_pairs.emplace_back(id(0, nth - j), id(0, j));
  }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nth; ++j) {
      // ring cells approaching a tip from below have three corners on the
      // slit axis; flip their diagonal to keep both triangles nondegenerate
      const bool slash = !(i == 0 && (j + 1 == nth / 2 || j + 1 == nth));
      push_cell(tmpl.triangles, id(i, j), id(i + 1, j), id(i + 1, j + 1),
                id(i, j + 1), slash);
    }
  return tmpl;
}

}  // namespace

MeshTemplate build_template(const DomainSpec& spec, int resolution,
                            DiagMode diag) {
  spec.validate();
  if (resolution < 2) throw ConfigError("mesh resolution must be >= 2");
  return spec.kind == OuterKind::Rectangle
             ? build_rectangle(spec, resolution, diag)
             : build_ellipse(spec, resolution);
}

MeshInstance instantiate(const MeshTemplate& tmpl, double t) {
  MeshInstance inst;
  inst.tmpl = &tmpl;
  inst.t = t;
  inst.nodes = tmpl.ref_nodes;
  const double r0 = tmpl.spec.chart_radius_r0;
  for (const SlitSpec& slit : tmpl.spec.slits) {
    const double t_ref = slit.half_length_t;
    if (!(t > 0.0) || t > t_ref * (1.0 + 1e-12))
      throw ConfigError("instantiate: need 0 < t <= t_ref");
    if (t == t_ref) continue;
    for (Point& p : inst.nodes) {
      const Point local{p.x - slit.center.x, p.y - slit.center.y};
      if (std::hypot(local.x, local.y) >= 2.0 * r0) continue;
      const Point moved = geometry::node_motion_map(local, t_ref, t, r0);
      p = {moved.x + slit.center.x, moved.y + slit.center.y};
    }
  }

  inst.geom.resize(tmpl.triangles.size());
  for (size_t k = 0; k < tmpl.triangles.size(); ++k) {
    const auto& tri = tmpl.triangles[k];
    const Point &A = inst.nodes[tri[0]], &B = inst.nodes[tri[1]],
                &C = inst.nodes[tri[2]];
    const double twoA =
        (B.x - A.x) * (C.y - A.y) - (C.x - A.x) * (B.y - A.y);
    if (!(twoA > 0.0))
      throw NumericalError("instantiate: nonpositive area in triangle " +
                           std::to_string(k) + " at t = " + std::to_string(t));
    TriGeom& g = inst.geom[k];
    g.area = 0.5 * twoA;
    const Point v[3] = {A, B, C};
    for (int e = 0; e < 3; ++e) {
      const Point &P = v[(e + 1) % 3], &Q = v[(e + 2) % 3];
      g.gx[e] = (P.y - Q.y) / twoA;
      g.gy[e] = (Q.x - P.x) / twoA;
    }
  }
  return inst;
}

void dump_mesh(const MeshInstance& inst, std::ostream& os) {
  const MeshTemplate& tmpl = *inst.tmpl;
  char buf[128];
  for (size_t i = 0; i < inst.nodes.size(); ++i) {
    std::string tag;
    const NodeTag& nt = tmpl.tags[i];
    if (nt.slit >= 0) {
      tag = "slit:" + std::to_string(nt.slit) + ":";
      tag += nt.side == SlitSide::Tip ? "tip"
             : nt.side == SlitSide::Top ? "top" : "bottom";
    } else if (nt.edge_mask) {
      tag = "outer:";
      const char* names[4] = {"left", "right", "bottom", "top"};
      bool first = true;
      for (int e = 0; e < 4; ++e)
        if (nt.edge_mask & (1u << e)) {
          if (!first) tag += '|';
          tag += names[e];
          first = false;
        }
    } else {
      tag = "interior";
    }
    std::snprintf(buf, sizeof buf, "n %zu %.12g %.12g %s\n", i,
                  inst.nodes[i].x, inst.nodes[i].y, tag.c_str());
    os << buf;
  }
  for (const auto& tri : tmpl.triangles) {
    std::snprintf(buf, sizeof buf, "t %d %d %d\n", tri[0], tri[1], tri[2]);
    os << buf;
  }
  for (const auto& [lo, hi] : tmpl.seam_pairs) {
    std::snprintf(buf, sizeof buf, "s %d %d\n", lo, hi);
    os << buf;
  }
}

double total_area(const MeshInstance& inst) {
  double a = 0.0;
  for (const TriGeom& g : inst.geom) a += g.area;
  return a;
}

}  // namespace slitlab::mesh

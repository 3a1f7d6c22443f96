#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <slitlab/mesh.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace slitlab;
using namespace slitlab::mesh;

namespace {

DomainSpec unit_square() {
  DomainSpec d;
  d.kind = OuterKind::Rectangle;
  d.a = d.b = 1.0;
  return d;
}

DomainSpec slit_square(double half_len, Bc bc = Bc::Dirichlet) {
  DomainSpec d = unit_square();
  SlitSpec s;
  s.center = {0.5, 0.5};
  s.half_length_t = half_len;
  s.condition = bc;
  d.slits.push_back(s);
  d.chart_radius_r0 = 0.25;
  return d;
}

}  // namespace

TEST_CASE("structured counts on the unslit unit square") {
  const auto tmpl = build_template(unit_square(), 8);
  CHECK(tmpl.ref_nodes.size() == 81);
  CHECK(tmpl.triangles.size() == 128);
  CHECK(tmpl.seam_pairs.empty());
  CHECK(tmpl.tip_nodes.empty());
}

TEST_CASE("midline slit of length 0.25 at resolution 16 has 3 seam pairs") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  CHECK(tmpl.seam_pairs.size() == 3);
  CHECK(tmpl.tip_nodes.size() == 2);
  CHECK(tmpl.ref_nodes.size() == 17 * 17 + 3);
  for (const auto& [lo, hi] : tmpl.seam_pairs) {
    CHECK(tmpl.ref_nodes[lo].x == tmpl.ref_nodes[hi].x);
    CHECK(tmpl.ref_nodes[lo].y == tmpl.ref_nodes[hi].y);
    CHECK(tmpl.tags[lo].side == geometry::SlitSide::Bottom);
    CHECK(tmpl.tags[hi].side == geometry::SlitSide::Top);
  }
}

TEST_CASE("two disjoint slits get independent seam structures") {
  DomainSpec d;
  d.kind = OuterKind::Rectangle;
  d.a = 2.0;
  d.b = 1.0;
  d.chart_radius_r0 = 0.25;
  for (double cx : {0.5, 1.5}) {
    SlitSpec s;
    s.center = {cx, 0.5};
    s.half_length_t = 0.125;
    d.slits.push_back(s);
  }
  const auto tmpl = build_template(d, 16);
  CHECK(tmpl.seam_pairs.size() == 6);
  CHECK(tmpl.tip_nodes.size() == 4);
  std::set<int> slit_of;
  for (const auto& [lo, hi] : tmpl.seam_pairs) {
    CHECK(tmpl.tags[lo].slit == tmpl.tags[hi].slit);
    slit_of.insert(tmpl.tags[lo].slit);
  }
  CHECK(slit_of == std::set<int>{0, 1});
}

TEST_CASE("instantiate at t_ref reproduces the reference geometry") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  const auto inst = instantiate(tmpl, 0.125);
  for (size_t i = 0; i < inst.nodes.size(); ++i) {
    CHECK(inst.nodes[i].x == tmpl.ref_nodes[i].x);
    CHECK(inst.nodes[i].y == tmpl.ref_nodes[i].y);
  }
}

TEST_CASE("instantiate moves tips to +-t and leaves the far field fixed") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  const double t = 0.0625;
  const auto inst = instantiate(tmpl, t);
  double x_lo = 1e9, x_hi = -1e9;
  for (int tip : tmpl.tip_nodes) {
    x_lo = std::min(x_lo, inst.nodes[tip].x);
    x_hi = std::max(x_hi, inst.nodes[tip].x);
    CHECK(inst.nodes[tip].y == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(x_lo == doctest::Approx(0.5 - t).epsilon(1e-12));
  CHECK(x_hi == doctest::Approx(0.5 + t).epsilon(1e-12));
  for (size_t i = 0; i < inst.nodes.size(); ++i) {
    const double d = std::hypot(tmpl.ref_nodes[i].x - 0.5,
                                tmpl.ref_nodes[i].y - 0.5);
    if (d >= 2.0 * tmpl.spec.chart_radius_r0) {
      CHECK(inst.nodes[i].x == tmpl.ref_nodes[i].x);
      CHECK(inst.nodes[i].y == tmpl.ref_nodes[i].y);
    }
  }
}

TEST_CASE("area sum equals the rectangle area for every t") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  for (double t : {0.125, 0.1, 0.05, 0.01})
    CHECK(total_area(instantiate(tmpl, t)) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("invalid instantiation parameters are rejected") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  CHECK_THROWS_AS(instantiate(tmpl, 0.25), ConfigError);
  CHECK_THROWS_AS(instantiate(tmpl, 0.0), ConfigError);
  CHECK_THROWS_AS(instantiate(tmpl, -0.1), ConfigError);
}

TEST_CASE("slit off the grid lines is rejected") {
  CHECK_THROWS_AS(build_template(slit_square(0.125), 3), ConfigError);
}

TEST_CASE("mirrored diagonals are symmetric about the midline") {
  const auto tmpl = build_template(unit_square(), 8);
  // reflect every triangle and look for it among the triangles
  std::set<std::set<std::pair<double, double>>> tris;
  for (const auto& tri : tmpl.triangles) {
    std::set<std::pair<double, double>> key;
    for (int v : tri) key.insert({tmpl.ref_nodes[v].x, tmpl.ref_nodes[v].y});
    tris.insert(key);
  }
  for (const auto& tri : tmpl.triangles) {
    std::set<std::pair<double, double>> key;
    for (int v : tri)
      key.insert({tmpl.ref_nodes[v].x, 1.0 - tmpl.ref_nodes[v].y});
    CHECK(tris.count(key) == 1);
  }
}

TEST_CASE("slash mode coincides with the lower half of a mirrored mesh") {
  DomainSpec half = unit_square();
  half.b = 0.5;
  const auto tmpl = build_template(half, 8, DiagMode::Slash);
  const auto full = build_template(unit_square(), 8);
  std::set<std::set<std::pair<double, double>>> full_tris;
  for (const auto& tri : full.triangles) {
    std::set<std::pair<double, double>> key;
    for (int v : tri) key.insert({full.ref_nodes[v].x, full.ref_nodes[v].y});
    full_tris.insert(key);
  }
  for (const auto& tri : tmpl.triangles) {
    std::set<std::pair<double, double>> key;
    for (int v : tri) key.insert({tmpl.ref_nodes[v].x, tmpl.ref_nodes[v].y});
    CHECK(full_tris.count(key) == 1);
  }
}

TEST_CASE("confocal-ellipse mesh: seams, area convergence, tags") {
  DomainSpec d;
  d.kind = OuterKind::ConfocalEllipse;
  d.x0 = std::asinh(1.0 / 0.3);
  SlitSpec s;
  s.center = {0.0, 0.0};
  s.half_length_t = 0.3;
  s.condition = Bc::Dirichlet;
  d.slits.push_back(s);
  d.chart_radius_r0 = 0.49;

  const double exact = std::numbers::pi * 0.09 * std::cosh(d.x0) *
                       std::sinh(d.x0);
  double prev_err = 1e9;
  for (int res : {16, 32}) {
    const auto tmpl = build_template(d, res);
    const auto inst = instantiate(tmpl, 0.3);
    const double err = std::abs(total_area(inst) - exact) / exact;
    CHECK(err < prev_err);
    prev_err = err;
    for (const auto& [lo, hi] : tmpl.seam_pairs) {
      CHECK(inst.nodes[lo].x == doctest::Approx(inst.nodes[hi].x).epsilon(1e-13));
      CHECK(std::abs(inst.nodes[lo].y) < 1e-13);
      CHECK(std::abs(inst.nodes[hi].y) < 1e-13);
    }
  }
  CHECK(prev_err < 2e-3);

  // shrink the slit: seams still coincide, areas stay positive
  const auto tmpl = build_template(d, 16);
  const auto inst = instantiate(tmpl, 0.15);
  for (const auto& [lo, hi] : tmpl.seam_pairs)
    CHECK(inst.nodes[lo].x == doctest::Approx(inst.nodes[hi].x).epsilon(1e-12));
  for (int tip : tmpl.tip_nodes)
    CHECK(std::abs(std::abs(inst.nodes[tip].x) - 0.15) < 1e-12);
}

TEST_CASE("mesh dump round-trips counts") {
  const auto tmpl = build_template(slit_square(0.125), 16);
  const auto inst = instantiate(tmpl, 0.1);
  std::ostringstream os;
  dump_mesh(inst, os);
  std::istringstream is(os.str());
  std::string line;
  size_t n = 0, t = 0, s = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == 'n') ++n;
    if (line[0] == 't') ++t;
    if (line[0] == 's') ++s;
  }
  CHECK(n == tmpl.ref_nodes.size());
  CHECK(t == tmpl.triangles.size());
  CHECK(s == tmpl.seam_pairs.size());
}

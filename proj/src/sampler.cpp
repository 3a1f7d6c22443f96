#include <slitlab/sampler.hpp>

#include <slitlab/types.hpp>

#include <algorithm>
#include <cmath>

namespace slitlab::sampler {

namespace {

constexpr double kBaryTol = 1e-9;

double cross(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool tri_contains(const std::vector<Point>& nodes,
                  const std::array<int, 3>& tri, Point p, double lam[3]) {
  const Point a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  const double twoA = cross(a, b, c);
  if (twoA <= 0.0) return false;
  lam[0] = cross(p, b, c) / twoA;
  lam[1] = cross(a, p, c) / twoA;
  lam[2] = cross(a, b, p) / twoA;
  return lam[0] >= -kBaryTol && lam[1] >= -kBaryTol && lam[2] >= -kBaryTol;
}

}  // namespace

P1Sampler::P1Sampler(const mesh::MeshInstance& inst) : inst_(&inst) {
  double xmin = inst.nodes[0].x, xmax = xmin;
  double ymin = inst.nodes[0].y, ymax = ymin;
  for (const Point& p : inst.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int ntri = static_cast<int>(inst.tmpl->triangles.size());
  nbx_ = nby_ = std::max(1, static_cast<int>(std::sqrt(ntri / 2.0)));
  x0_ = xmin;
  y0_ = ymin;
  hx_ = std::max(xmax - xmin, 1e-300) / nbx_;
  hy_ = std::max(ymax - ymin, 1e-300) / nby_;
  bins_.assign(static_cast<size_t>(nbx_) * nby_, {});
  for (int k = 0; k < ntri; ++k) {
    const auto& tri = inst.tmpl->triangles[k];
    double txmin = inst.nodes[tri[0]].x, txmax = txmin;
    double tymin = inst.nodes[tri[0]].y, tymax = tymin;
    for (int e = 1; e < 3; ++e) {
      txmin = std::min(txmin, inst.nodes[tri[e]].x);
      txmax = std::max(txmax, inst.nodes[tri[e]].x);
      tymin = std::min(tymin, inst.nodes[tri[e]].y);
      tymax = std::max(tymax, inst.nodes[tri[e]].y);
    }
    const int i0 = std::clamp(static_cast<int>((txmin - x0_) / hx_), 0, nbx_ - 1);
    const int i1 = std::clamp(static_cast<int>((txmax - x0_) / hx_), 0, nbx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tymin - y0_) / hy_), 0, nby_ - 1);
    const int j1 = std::clamp(static_cast<int>((tymax - y0_) / hy_), 0, nby_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        bins_[static_cast<size_t>(i) * nby_ + j].push_back(k);
  }
}

int P1Sampler::locate(Point p) const {
  double lam[3];
  const int bi = std::clamp(static_cast<int>((p.x - x0_) / hx_), 0, nbx_ - 1);
  const int bj = std::clamp(static_cast<int>((p.y - y0_) / hy_), 0, nby_ - 1);
  for (int k : bins_[static_cast<size_t>(bi) * nby_ + bj])
    if (tri_contains(inst_->nodes, inst_->tmpl->triangles[k], p, lam)) return k;
  // Fallback for points near bin boundaries or just outside their bin.
  const int ntri = static_cast<int>(inst_->tmpl->triangles.size());
  for (int k = 0; k < ntri; ++k)
    if (tri_contains(inst_->nodes, inst_->tmpl->triangles[k], p, lam)) return k;
  return -1;
}

PointSample P1Sampler::eval(const Eigen::VectorXd& nodal, Point p,
                            geometry::SlitSide side) const {
  // Nudge points that land on a slit line onto the requested face.
  for (const SlitSpec& s : inst_->tmpl->spec.slits) {
    const double ca = std::cos(s.angle), sa = std::sin(s.angle);
    const double dx = p.x - s.center.x, dy = p.y - s.center.y;
    const double xi = ca * dx + sa * dy;
    const double eta = -sa * dx + ca * dy;
    const double eps = 1e-12 * (1.0 + std::abs(xi));
    if (std::abs(eta) < eps && std::abs(xi) <= inst_->t + eps) {
      const double delta =
          (side == geometry::SlitSide::Bottom ? -1.0 : 1.0) * 1e-9;
      p.x -= sa * delta;
      p.y += ca * delta;
      break;
    }
  }
  const int k = locate(p);
  if (k < 0) throw NumericalError("sample point outside mesh");
  const auto& tri = inst_->tmpl->triangles[k];
  double lam[3];
  tri_contains(inst_->nodes, tri, p, lam);
  const mesh::TriGeom& g = inst_->geom[k];
  PointSample out;
  for (int e = 0; e < 3; ++e) {
    const double u = nodal[tri[e]];
    out.v += lam[e] * u;
    out.gx += g.gx[e] * u;
    out.gy += g.gy[e] * u;
  }
  return out;
}

AnnulusSamples sample_annulus(const P1Sampler& sampler,
                              const Eigen::VectorXd& nodal, Point center,
                              double t, double x_max, int nx, int ntheta) {
  if (nx < 1 || ntheta < 4) throw ConfigError("annulus grid too small");
  AnnulusSamples out;
  out.x = Eigen::VectorXd::LinSpaced(nx + 1, 0.0, x_max);
  out.v.resize(nx + 1, ntheta);
  out.vx.resize(nx + 1, ntheta);
  out.vth.resize(nx + 1, ntheta);
  for (int i = 0; i <= nx; ++i) {
    const double ch = std::cosh(out.x[i]), sh = std::sinh(out.x[i]);
    for (int j = 0; j < ntheta; ++j) {
      const double th = 2.0 * M_PI * j / ntheta;
      const double ct = std::cos(th), st = std::sin(th);
      const Point p{center.x + t * ch * ct, center.y + t * sh * st};
      const auto side = st >= 0.0 ? geometry::SlitSide::Top
                                  : geometry::SlitSide::Bottom;
      const PointSample s = sampler.eval(nodal, p, side);
      out.v(i, j) = s.v;
      out.vx(i, j) = t * (sh * ct * s.gx + ch * st * s.gy);
      out.vth(i, j) = t * (-ch * st * s.gx + sh * ct * s.gy);
    }
  }
  return out;
}

}  // namespace slitlab::sampler

#include <slitlab/geometry.hpp>

#include <cmath>
#include <numbers>

namespace slitlab::geometry {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Point elliptical_to_cartesian(double t, const EllipticalPoint& p, Point center) {
  const double a = std::sqrt(p.r * p.r + t * t);
  return {a * std::cos(p.theta) + center.x, p.r * std::sin(p.theta) + center.y};
}

EllipticalPoint elliptical_from_cartesian(double t, Point p, Point center) {
  const double x = p.x - center.x;
  const double y = p.y - center.y;
  // r^4 + r^2 (t^2 - x^2 - y^2) - y^2 t^2 = 0
  const double s = x * x + y * y - t * t;
  const double r2 = 0.5 * (s + std::sqrt(s * s + 4.0 * y * y * t * t));
  const double r = std::sqrt(std::max(r2, 0.0));
  EllipticalPoint out;
  out.r = r;
  const double a = std::sqrt(r2 + t * t);
  double theta = std::atan2(r > 0.0 ? y / r : 0.0, a > 0.0 ? x / a : 0.0);
  if (theta < 0.0) theta += kTwoPi;
  out.theta = theta;
  if (r == 0.0) {
    if (std::abs(std::abs(x) - t) < 1e-14 * (1.0 + t))
      out.side = SlitSide::Tip;
    else
      out.side = y >= 0.0 ? SlitSide::Top : SlitSide::Bottom;
  } else {
    out.side = y >= 0.0 ? SlitSide::Top : SlitSide::Bottom;
  }
  return out;
}

MetricWeights metric_weights(double t, const EllipticalPoint& p) {
  if (p.r == 0.0 && t == 0.0)
    throw NumericalError("metric_weights: degenerate point r = t = 0");
  const double st = std::sin(p.theta);
  const double denom = p.r * p.r + t * t * st * st;
  const double a2 = p.r * p.r + t * t;
  return {a2 / denom, 1.0 / denom, denom / std::sqrt(a2)};
}

double sigma_cutoff(double u) {
  u = std::abs(u);
  if (u <= 1.0) return 1.0;
  if (u >= 2.0) return 0.0;
  const double v = u - 1.0;
  return 1.0 - v * v * v * (10.0 + v * (-15.0 + 6.0 * v));
}

double sigma_cutoff_deriv(double u) {
  const double sign = u < 0.0 ? -1.0 : 1.0;
  u = std::abs(u);
  if (u <= 1.0 || u >= 2.0) return 0.0;
  const double v = u - 1.0;
  return -sign * 30.0 * v * v * (1.0 + v * (-2.0 + v));
}

namespace {

// Solves r^2 + t^2 sigma(r/r0) = target^2 for r >= 0 (monotone for t < r0).
double invert_on_axis(double target, double t, double r0) {
  double lo = 0.0, hi = 2.0 * r0 + std::abs(target);
  auto g = [&](double r) {
    return r * r + t * t * sigma_cutoff(r / r0) - target * target;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Recovers r from cartesian (x, y) with y != 0 under the cutoff map
// phi~_{t}(r,theta) = (sqrt(r^2 + t^2 sigma(r/r0)) cos th, r sin th).
double invert_off_axis(double x, double y, double t, double r0) {
  auto f = [&](double r) {
    const double denom = r * r + t * t * sigma_cutoff(r / r0);
    return x * x / denom + y * y / (r * r) - 1.0;
  };
  // f decreases from +inf (r -> 0) through the root; root <= |p|.
  double hi = std::sqrt(x * x + y * y);
  double lo = std::min(1e-14 * (1.0 + hi), 0.5 * hi);
  while (f(lo) < 0.0) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Point node_motion_map(Point p_ref, double t_ref, double t, double r0) {
  if (!(0.0 < t && t <= t_ref && t_ref < r0))
    throw ConfigError("node_motion_map: requires 0 < t <= t_ref < r0");
  if (t == t_ref) return p_ref;
  const double x = p_ref.x, y = p_ref.y;
  const double rad = std::hypot(x, y);
  if (rad >= 2.0 * r0) return p_ref;

  // On the slit itself the map scales the slit linearly.
  if (y == 0.0 && std::abs(x) <= t_ref) return {x * t / t_ref, 0.0};

  double r;
  if (y == 0.0) {
    r = invert_on_axis(std::abs(x), t_ref, r0);
  } else {
    r = invert_off_axis(x, y, t_ref, r0);
  }
  // Only the x coordinate changes: y = r sin(theta) is preserved.
  const double sig = sigma_cutoff(r / r0);
  const double scale = std::sqrt((r * r + t * t * sig) /
                                 (r * r + t_ref * t_ref * sig));
  return {x * scale, y};
}

}  // namespace slitlab::geometry

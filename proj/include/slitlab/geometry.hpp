#pragma once

#include <slitlab/types.hpp>

namespace slitlab::geometry {

/// Point in the elliptical chart around a slit.  The slit is the locus
/// r = 0; theta in (0,pi) and (pi,2pi) are its two faces, theta in {0,pi}
/// the shared tips.  `side` disambiguates the face when r == 0 and theta
/// would be ambiguous after completion.
enum class SlitSide { Top, Bottom, Tip };

struct EllipticalPoint {
  double r = 0.0;      // >= 0
  double theta = 0.0;  // [0, 2pi)
  SlitSide side = SlitSide::Top;
};

/// x = sqrt(r^2+t^2) cos(theta), y = r sin(theta), relative to `center`.
Point elliptical_to_cartesian(double t, const EllipticalPoint& p,
                              Point center = {0.0, 0.0});

/// Inverse of elliptical_to_cartesian away from the slit (r > 0); closed form.
EllipticalPoint elliptical_from_cartesian(double t, Point p,
                                          Point center = {0.0, 0.0});

struct MetricWeights {
  double grad_r_coeff;      // (r^2+t^2)/(r^2+t^2 sin^2 th)
  double grad_theta_coeff;  // 1/(r^2+t^2 sin^2 th)
  double density;           // (r^2+t^2 sin^2 th)/sqrt(r^2+t^2)
};

/// Coefficients of the gradient and the area density in elliptical
/// coordinates.  Throws NumericalError at the degenerate point r=t=0.
MetricWeights metric_weights(double t, const EllipticalPoint& p);

/// C^2 cutoff: 1 on [0,1], 0 on [2,inf), monotone quintic in between.
double sigma_cutoff(double u);
double sigma_cutoff_deriv(double u);

/// Moves a point of the reference (t_ref) slit configuration to the
/// length-t configuration.  Coordinates are in the slit frame: slit center
/// at the origin, slit along the x axis.  Identity outside radius 2*r0.
/// Requires 0 < t <= t_ref < r0.
Point node_motion_map(Point p_ref, double t_ref, double t, double r0);

}  // namespace slitlab::geometry

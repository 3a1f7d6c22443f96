#pragma once

#include <slitlab/geometry.hpp>
#include <slitlab/mesh.hpp>

#include <Eigen/Core>

#include <vector>

namespace slitlab::sampler {

struct PointSample {
  double v = 0.0;
  double gx = 0.0;  // piecewise-constant P1 gradient
  double gy = 0.0;
};

/// Point evaluation of P1 fields on a MeshInstance with bin-accelerated
/// triangle location.  Points on a slit line are nudged to the requested
/// face before location.
class P1Sampler {
 public:
  explicit P1Sampler(const mesh::MeshInstance& inst);

  /// `nodal` lives on the full node space (use fem::expand_to_nodes).
  PointSample eval(const Eigen::VectorXd& nodal, Point p,
                   geometry::SlitSide side = geometry::SlitSide::Top) const;

 private:
  int locate(Point p) const;

  const mesh::MeshInstance* inst_;
  double x0_, y0_, hx_, hy_;
  int nbx_, nby_;
  std::vector<std::vector<int>> bins_;
};

/// psi and its elliptical-chart derivatives on a tensor grid over the
/// annulus around a slit: rows x_i in [0, x_max] (uniform, inclusive),
/// columns theta_j = 2 pi j / ntheta.
struct AnnulusSamples {
  Eigen::VectorXd x;
  Eigen::MatrixXd v, vx, vth;
};

AnnulusSamples sample_annulus(const P1Sampler& sampler,
                              const Eigen::VectorXd& nodal, Point center,
                              double t, double x_max, int nx, int ntheta);

}  // namespace slitlab::sampler

#pragma once

#include <slitlab/types.hpp>

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace slitlab::mathieu {

/// Parity/symmetry block of the angular operator -d^2/dth^2 + h^2 cos^2(th).
enum class SymmetryClass { CosEven, CosOdd, SinOdd, SinEven };

const char* to_string(SymmetryClass c);

/// One angular Mathieu eigenpair (b_i(h), v_i).  `fourier_coeffs` holds the
/// coefficients in the orthonormal circle basis
///   { (2pi)^{-1/2}, pi^{-1/2} cos k th, pi^{-1/2} sin k th },
/// laid out as [const, cos 1..N, sin 1..N] (size 2N+1).
struct AngularMode {
  int index = 0;
  double h = 0.0;
  double b = 0.0;
  SymmetryClass symmetry_class = SymmetryClass::CosEven;
  Eigen::VectorXd fourier_coeffs;
};

/// Ascending eigenvalues b_0 <= b_1 <= ... of the angular operator,
/// assembled per symmetry block (cos^2 = 1/2 + cos(2th)/2 couples k <-> k+-2)
/// and merged; h = 0 ties break cos before sin.  The result is checked
/// against a doubled truncation; requires truncation_N >= 4 n_modes + 16.
std::vector<AngularMode> angular_spectrum(double h, int n_modes,
                                          int truncation_N);

/// Eigenvalues-only fast path: same blocks and convergence guard as
/// angular_spectrum, solved as symmetric tridiagonal problems without
/// eigenvectors.  Used in inner loops that only consume b_i(h).
std::vector<double> angular_values(double h, int n_modes, int truncation_N);

/// Fourier synthesis of a mode at theta.
double angular_eval(const AngularMode& mode, double theta);

/// Radial Mathieu solution of  u'' = (b - h^2 cosh^2 x) u  on [0, x_max].
/// Stored (value, deriv) carry a running rescale: the true solution is
/// value * exp(log_scale) at each sample.
struct RadialSolution {
  int index = 0;
  double h = 0.0;
  double b = 0.0;
  Bc bc_at_zero = Bc::Dirichlet;  // Dirichlet: u(0)=0,u'(0)=1; Neumann: 1,0
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> derivs;
  std::vector<double> log_scale;

  double value_at(size_t k) const { return values[k] * std::exp(log_scale[k]); }
  double deriv_at(size_t k) const { return derivs[k] * std::exp(log_scale[k]); }
};

RadialSolution radial_solve(int index, double h, double b, Bc bc,
                            double x_max, double tol, int n_out = 257);

/// Endpoint state of the radial integration plus the interior node count;
/// the lean path used by the shooting solver.
struct RadialEndpoint {
  double u = 0.0;       // rescaled
  double du = 0.0;      // rescaled
  double log_scale = 0.0;
  int nodes = 0;        // sign changes of u in (0, x_max)
};

RadialEndpoint radial_endpoint(double h, double b, Bc bc, double x_max,
                               double tol);

/// Angular expansion u_i(x_k) of samples psi(x_k, theta_j) on a tensor grid
/// with a uniform theta grid.  Row k of the result holds the coefficients of
/// psi(x_k, .) against modes 0..n_modes-1.  Requires >= 8 n_modes theta points.
struct Expansion {
  std::vector<AngularMode> modes;
  Eigen::MatrixXd coeffs;  // (n_x, n_modes)

  /// Relative Parseval defect of the expansion against the direct
  /// theta-quadrature of |psi|^2, aggregated over the x rows with weights w.
  double parseval_defect(const Eigen::MatrixXd& samples,
                         const Eigen::VectorXd& x_weights) const;
};

Expansion mathieu_expand(const Eigen::MatrixXd& samples, double h, int n_modes);

}  // namespace slitlab::mathieu

#pragma once

#include <slitlab/mathieu.hpp>
#include <slitlab/types.hpp>

#include <vector>

namespace slitlab::sov {

/// Slit-ellipse model problem: slit [-t, t] on the x axis, outer boundary the
/// confocal ellipse x = x0 (so the outer radius is r0 = t sinh x0).
struct SovProblem {
  double t = 0.0;
  double x0 = 0.0;
  Bc slit_bc = Bc::Dirichlet;
  Bc outer_bc = Bc::Dirichlet;
  int index = 0;  // angular index, used by shoot_residual only

  void validate() const;
};

struct SovEigenvalue {
  double E = 0.0;
  int index = 0;
  int nodes = 0;      // interior radial nodes
  double residual = 0.0;
};

/// Outer-boundary defect of the separated solution at trial eigenvalue E.
/// h = t sqrt(E), b = b_i(h); the radial equation is integrated from the slit
/// boundary condition at x = 0 and the defect is u(x0) (Dirichlet outer) or
/// u'(x0) (Neumann outer), normalized to O(1) so sign changes bracket
/// eigenvalues.
double shoot_residual(const SovProblem& prob, double E);

/// All eigenvalues up to E_max (at most per_index_count per angular index),
/// merged ascending.  Sign changes of shoot_residual are bracketed on a grid
/// with step min(1, E)/20 and refined by bisection to relative 1e-9.
std::vector<SovEigenvalue> eigenvalues_sov(const SovProblem& prob, double E_max,
                                           int per_index_count);

}  // namespace slitlab::sov

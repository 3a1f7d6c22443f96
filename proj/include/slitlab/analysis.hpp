#pragma once

#include <slitlab/fem.hpp>
#include <slitlab/mesh.hpp>
#include <slitlab/sampler.hpp>
#include <slitlab/types.hpp>

#include <Eigen/Core>

#include <string>
#include <vector>

namespace slitlab::analysis {

/// Eigenvalue branches tracked over a strictly decreasing t grid by
/// mass-matrix overlap of consecutive eigenvectors.
struct BranchSet {
  std::vector<double> t_grid;
  Eigen::MatrixXd E;                // n_t x k, branch-ordered
  std::vector<Eigen::MatrixXd> U;   // per t: free DOFs x k, M-orthonormal
  std::vector<fem::Assembled> ops;  // per t: matrices the vectors live in
  Eigen::MatrixXd overlap;          // n_t x k; row 0 is all ones
  std::vector<std::string> warnings;
};

BranchSet track_branches(const mesh::MeshTemplate& tmpl,
                         const std::vector<double>& t_grid, int k,
                         int buffer = 5);

/// Least-squares fit E(t) ~ E0 + c t^p with p scanned over (0, 2].
struct FitResult {
  double E0 = 0.0, c = 0.0, p = 0.0;
  double residual = 0.0;          // RMS relative misfit
  bool accepted = false;          // false when the tail is not monotone
  std::vector<double> t2E;        // t^2 E(t) along the grid
};

FitResult extrapolate_limit(const std::vector<double>& t,
                            const std::vector<double>& E);

/// Quadrature of the annulus forms in elliptical coordinates:
///   q_U   =        int (v_x^2 + v_th^2)
///   N_U   = t^2    int v^2 (sinh^2 x + sin^2 th)
///   qdot  = (1/t)  int (v_x^2 - v_th^2) / cosh^2 x
///   Ndot  = t      int v^2 (sin^2 th - cos^2 th tanh^2 x)
/// plus the comparison integrals for the derivative estimates.
struct AnnulusForms {
  double q = 0.0, N = 0.0, qdot = 0.0, Ndot = 0.0;
  double theta_deriv_sech2 = 0.0;  // int v_th^2 / cosh^2 x
  double mass = 0.0;               // int v^2
};

AnnulusForms annulus_forms(const sampler::AnnulusSamples& s, double t);

/// Per-(branch, t) derivative audit: Hellmann-Feynman Edot against a
/// fine finite-difference oracle, the trivial-bound slack, and the
/// annulus ratio kappa = t Ndot_U / N.
struct VariationPoint {
  double t = 0.0;
  int branch = 0;
  double E = 0.0;
  double edot_hf = 0.0, edot_fd = 0.0, rel_err = 0.0;
  double lambda = 0.0;  // -Edot/E
  double slack = 0.0;   // lambda - 2/t (fitted C of the trivial bound)
  double kappa = 0.0;
  AnnulusForms forms;
  double mass_ratio = 0.0;  // elliptical window r < r_star
  bool skipped = false;
  std::string note;
};

/// r_star defaults to half the chart radius when nonpositive.
std::vector<VariationPoint> variation_audit(const mesh::MeshTemplate& tmpl,
                                            const BranchSet& bs,
                                            double r_star = -1.0);

/// Convexity suite for w = u^2 of a radial mode on [0, X], applicable
/// when b - h^2 cosh^2 X >= 1/2:
///   superadditivity     w(x+y) >= w(x) cosh y,
///   decreasing weight   int p w <= (p(0)/cosh(X/2) + p(X/2)) int w,  p = sech^2
///   increasing weight   int w <= (2/p(X/2)) int w p,                 p = sinh^2
struct ConvexityReport {
  bool applicable = false;
  double condition = 0.0;  // b - h^2 cosh^2 X
  double super_slack = 0.0;
  double convex_slack = 0.0;
  double convex2_slack = 0.0;
};

ConvexityReport convexity_report(int index, double h, double b, Bc bc,
                                 double X);

/// Angular-mode decomposition of an annulus sample and the per-mode
/// comparison ratios behind the derivative and norm estimates.  Fitted
/// exponents are the largest e with ratio <= coeff * t^e over the
/// retained modes (negative when an inequality fails outright).
struct ModeEstimates {
  double t = 0.0, h = 0.0, Y = 0.0, X_eps = 0.0;
  double parseval_defect = 0.0;
  std::vector<double> ratio_der;   // (int u_i^2/cosh^2) / int u_i^2, i >= 1
  std::vector<double> ratio_norm;  // (int u_i^2) / int u_i^2 sinh^2, i >= 1
  double ratio_norm_all = 0.0;     // same ratio including mode 0
  double eps_der = 0.0;            // coeff 2 sqrt(2)
  double eps_norm = 0.0;           // coeff 8
  double eps_nco = 0.0;            // coeff 1, exponent e/2 convention
};

ModeEstimates mode_estimates(const sampler::AnnulusSamples& s, double t,
                             double E, double eps_ref, int n_modes);

/// Mass fraction of a nodal field inside the elliptical window r < r_star
/// around a slit (triangles classified by centroid).
double elliptical_mass_ratio(const mesh::MeshInstance& inst,
                             const Eigen::VectorXd& nodal, Point center,
                             double t, double r_star);

/// Mixed-BC rectangle [0,a]x[0,1] (Dirichlet vertical, Neumann horizontal
/// edges) with one midline slit: full spectrum vs the merged spectra of
/// the two half-rectangle problems (seam complement Neumann for the even
/// part, Dirichlet for the odd part).
struct SymmetryReport {
  std::vector<double> full;
  std::vector<double> merged;
  double max_rel_diff = 0.0;  // over the first `compare` values
  int count_full = 0, count_merged = 0;  // eigenvalues below lambda_cut
  double lambda_cut = 0.0;
};

SymmetryReport symmetry_reduction_check(double a, double slit_half_length,
                                        Bc slit_bc, int resolution,
                                        double lambda_cut, int compare = 10);

/// Minimal adjacent gap per t and isolated-local-minimum crossing flags.
struct GapScanRow {
  double t = 0.0;
  double min_gap = 0.0;
  int arg = 0;  // lower index of the closest pair
  bool candidate = false;
};

std::vector<GapScanRow> gap_scan(const BranchSet& bs, double threshold);

}  // namespace slitlab::analysis

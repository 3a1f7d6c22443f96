#include <slitlab/fem.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace slitlab::fem {

using mesh::MeshInstance;
using mesh::MeshTemplate;

bool is_dirichlet_node(const MeshTemplate& tmpl, int node) {
  const mesh::NodeTag& tag = tmpl.tags[node];
  if (tag.slit >= 0)
    return tmpl.spec.slits[tag.slit].condition == Bc::Dirichlet;
  if (!tag.edge_mask) return false;
  const Point p = tmpl.ref_nodes[node];
  for (int e = 0; e < 4; ++e) {
    if (!(tag.edge_mask & (1u << e))) continue;
    double coord;
    if (tmpl.spec.kind == OuterKind::ConfocalEllipse) {
      coord = std::atan2(p.y, p.x);
      if (coord < 0.0) coord += 2.0 * std::numbers::pi;
    } else {
      coord = (e < 2) ? p.y : p.x;
    }
    if (tmpl.spec.edge_bc(e, coord) == Bc::Dirichlet) return true;
  }
  return false;
}

Assembled assemble(const MeshInstance& inst) {
  const MeshTemplate& tmpl = *inst.tmpl;
  const int n_nodes = int(inst.nodes.size());
  Assembled out;
  out.node_to_free.assign(n_nodes, -1);
  for (int i = 0; i < n_nodes; ++i)
    if (!is_dirichlet_node(tmpl, i)) {
      out.node_to_free[i] = int(out.free_to_node.size());
      out.free_to_node.push_back(i);
    }
  const int n = int(out.free_to_node.size());
  if (n == 0) throw ConfigError("assemble: no free degrees of freedom");

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(tmpl.triangles.size() * 9);
  mt.reserve(tmpl.triangles.size() * 9);
  for (size_t e = 0; e < tmpl.triangles.size(); ++e) {
    const auto& tri = tmpl.triangles[e];
    const mesh::TriGeom& g = inst.geom[e];
    for (int a = 0; a < 3; ++a) {
      const int ia = out.node_to_free[tri[a]];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int ib = out.node_to_free[tri[b]];
        if (ib < 0) continue;
        kt.emplace_back(ia, ib,
                        g.area * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b]));
        mt.emplace_back(ia, ib, g.area / 12.0 * (a == b ? 2.0 : 1.0));
      }
    }
  }
  out.K.resize(n, n);
  out.M.resize(n, n);
  out.K.setFromTriplets(kt.begin(), kt.end());
  out.M.setFromTriplets(mt.begin(), mt.end());
  return out;
}

Eigen::VectorXd expand_to_nodes(const Assembled& asm_,
                                const Eigen::VectorXd& u_free) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(asm_.node_to_free.size());
  for (size_t i = 0; i < asm_.free_to_node.size(); ++i)
    full(asm_.free_to_node[i]) = u_free(i);
  return full;
}

namespace {

Eigen::VectorXd residuals_of(const Assembled& asm_, const Eigen::VectorXd& E,
                             const Eigen::MatrixXd& U) {
  Eigen::VectorXd r(E.size());
  for (int j = 0; j < E.size(); ++j) {
    const Eigen::VectorXd Mu = asm_.M * U.col(j);
    r(j) = (asm_.K * U.col(j) - E(j) * Mu).norm() /
           (Mu.norm() * (1.0 + std::abs(E(j))));
  }
  return r;
}

Spectrum solve_dense(const Assembled& asm_, int k) {
  Eigen::MatrixXd Kd(asm_.K), Md(asm_.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
  if (es.info() != Eigen::Success)
    throw NumericalError("solve_eigs: dense generalized eigensolve failed");
  Spectrum s;
  s.E = es.eigenvalues().head(k);
  s.U = es.eigenvectors().leftCols(k);
  s.residual = residuals_of(asm_, s.E, s.U);
  return s;
}

Spectrum solve_sparse(const Assembled& asm_, int k) {
  const int n = int(asm_.K.rows());
  const int p = std::min(n, k + 8);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  double sigma = -1.0;
  for (int attempt = 0;; ++attempt) {
    Eigen::SparseMatrix<double> shifted = asm_.K - sigma * asm_.M;
    ldlt.compute(shifted);
    if (ldlt.info() == Eigen::Success) break;
    if (attempt >= 2)
      throw NumericalError("solve_eigs: sparse factorization failed");
    sigma *= 3.7;  // perturb the shift and retry
  }

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd V(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) V(i, j) = gauss(rng);

  Spectrum s;
  Eigen::VectorXd prevE;
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::MatrixXd W = ldlt.solve(asm_.M * V);
    // Rayleigh-Ritz on the subspace
    const Eigen::MatrixXd Kp = W.transpose() * (asm_.K * W);
    const Eigen::MatrixXd Mp = W.transpose() * (asm_.M * W);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kp, Mp);
    if (es.info() != Eigen::Success)
      throw NumericalError("solve_eigs: Rayleigh-Ritz solve failed");
    V = W * es.eigenvectors();
    s.E = es.eigenvalues().head(k);
    s.U = V.leftCols(k);
    s.residual = residuals_of(asm_, s.E, s.U);
    const bool vals_settled =
        prevE.size() == k &&
        ((s.E - prevE).cwiseAbs().array() <=
         1e-12 * (1.0 + s.E.cwiseAbs().array())).all();
    if (vals_settled && s.residual.maxCoeff() <= 1e-8) return s;
    prevE = s.E;
  }
  throw NumericalError("solve_eigs: subspace iteration did not converge");
}

}  // namespace

Spectrum solve_eigs(const Assembled& asm_, int k, int dense_threshold) {
  const int n = int(asm_.K.rows());
  if (k < 1 || k > n)
    throw ConfigError("solve_eigs: need 1 <= k <= free DOFs");
  Spectrum s = n <= dense_threshold ? solve_dense(asm_, k)
                                    : solve_sparse(asm_, k);
  if (s.residual.maxCoeff() > 1e-8)
    throw NumericalError("solve_eigs: residual contract violated");
  return s;
}

MatrixDerivative matrix_derivative(const MeshTemplate& tmpl, double t,
                                   double delta) {
  if (!(delta > 0.0) || !(delta < t / 4.0))
    throw ConfigError("matrix_derivative: need 0 < delta < t/4");
  const Assembled plus = assemble(mesh::instantiate(tmpl, t + delta));
  const Assembled minus = assemble(mesh::instantiate(tmpl, t - delta));
  MatrixDerivative d;
  d.Kdot = (plus.K - minus.K) / (2.0 * delta);
  d.Mdot = (plus.M - minus.M) / (2.0 * delta);
  return d;
}

double hellmann_feynman(const MatrixDerivative& deriv, const Assembled& asm_,
                        const Spectrum& spec, int k) {
  if (k < 0 || k >= spec.E.size())
    throw ConfigError("hellmann_feynman: index out of range");
  const double E = spec.E(k);
  for (int j : {k - 1, k + 1}) {
    if (j < 0 || j >= spec.E.size()) continue;
    if (std::abs(spec.E(j) - E) <= 1e-6 * (1.0 + std::abs(E)))
      throw NumericalError(
          "hellmann_feynman: eigenvalue not simple at requested index");
  }
  const Eigen::VectorXd u = spec.U.col(k);
  const double num =
      u.dot(deriv.Kdot * u) - E * u.dot(deriv.Mdot * u);
  return num / u.dot(asm_.M * u);
}

}  // namespace slitlab::fem

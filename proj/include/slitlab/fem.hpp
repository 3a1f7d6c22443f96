#pragma once

#include <slitlab/mesh.hpp>
#include <slitlab/types.hpp>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace slitlab::fem {

/// Stiffness and mass matrices reduced to the free degrees of freedom
/// (Dirichlet outer edges and both faces plus tips of Dirichlet slits
/// eliminated).
struct Assembled {
  Eigen::SparseMatrix<double> K, M;
  std::vector<int> free_to_node;
  std::vector<int> node_to_free;  // -1 for eliminated nodes
};

Assembled assemble(const mesh::MeshInstance& inst);

/// True if the node is pinned by a Dirichlet condition.
bool is_dirichlet_node(const mesh::MeshTemplate& tmpl, int node);

struct Spectrum {
  Eigen::VectorXd E;       // ascending
  Eigen::MatrixXd U;       // free DOFs x k, M-orthonormal
  Eigen::VectorXd residual;  // ||K u - E M u|| / (||M u|| (1 + E))
};

/// k smallest generalized eigenpairs of (K, M).  Dense solve below
/// `dense_threshold` free DOFs, otherwise shift-invert subspace iteration on
/// a sparse LDLT factorization.  Residual contract:
/// ||K u - E M u|| <= 1e-8 ||M u|| (1 + E).
Spectrum solve_eigs(const Assembled& asm_, int k, int dense_threshold = 3000);

/// Scatter a free-DOF vector to the full node space (zeros on eliminated).
Eigen::VectorXd expand_to_nodes(const Assembled& asm_,
                                const Eigen::VectorXd& u_free);

/// Central differences (A(t+delta) - A(t-delta)) / (2 delta) of the
/// assembled matrices; requires 0 < delta < t/4.
struct MatrixDerivative {
  Eigen::SparseMatrix<double> Kdot, Mdot;
};

MatrixDerivative matrix_derivative(const mesh::MeshTemplate& tmpl, double t,
                                   double delta);

/// Eigenvalue derivative dE/dt of pair k via the first-order perturbation
/// identity; requires a simple eigenvalue (relative gap > 1e-6).
double hellmann_feynman(const MatrixDerivative& deriv, const Assembled& asm_,
                        const Spectrum& spec, int k);

}  // namespace slitlab::fem

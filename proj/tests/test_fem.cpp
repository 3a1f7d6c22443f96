#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <slitlab/fem.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace slitlab;
using namespace slitlab::fem;

namespace {

constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

DomainSpec square(Bc bc) {
  DomainSpec d;
  d.a = d.b = 1.0;
  for (int e = 0; e < 4; ++e) d.outer_bc[e] = bc;
  return d;
}

DomainSpec slit_square(double half_len, Bc slit_bc) {
  DomainSpec d = square(Bc::Dirichlet);
  SlitSpec s;
  s.center = {0.5, 0.5};
  s.half_length_t = half_len;
  s.condition = slit_bc;
  d.slits.push_back(s);
  d.chart_radius_r0 = 0.24;
  return d;
}

double ground(const DomainSpec& d, int res, double t) {
  const auto tmpl = mesh::build_template(d, res);
  const auto asm_ = assemble(mesh::instantiate(tmpl, t));
  return solve_eigs(asm_, 1).E(0);
}

}  // namespace

TEST_CASE("unit square all-Dirichlet ground state brackets 2 pi^2 from above") {
  const auto tmpl = mesh::build_template(square(Bc::Dirichlet), 32);
  const auto asm_ = assemble(mesh::instantiate(tmpl, 1.0));
  const auto spec = solve_eigs(asm_, 3);
  CHECK(spec.E(0) > 2.0 * kPiSq);
  CHECK(spec.E(0) < 2.0 * kPiSq * 1.01);
}

TEST_CASE("mixed-BC rectangle ground state matches pi^2/2") {
  DomainSpec d;
  d.a = std::numbers::sqrt2;
  d.b = 1.0;
  d.outer_bc[0] = d.outer_bc[1] = Bc::Dirichlet;
  d.outer_bc[2] = d.outer_bc[3] = Bc::Neumann;
  const auto tmpl = mesh::build_template(d, 32);
  const auto spec = solve_eigs(assemble(mesh::instantiate(tmpl, 1.0)), 1);
  const double exact = kPiSq / 2.0;
  CHECK(spec.E(0) > exact);
  CHECK(spec.E(0) < exact * 1.01);
}

TEST_CASE("all-Neumann square: constants in the stiffness kernel, mass = area") {
  const auto tmpl = mesh::build_template(square(Bc::Neumann), 16);
  const auto asm_ = assemble(mesh::instantiate(tmpl, 1.0));
  CHECK(asm_.free_to_node.size() == 17 * 17);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(asm_.K.rows());
  CHECK((asm_.K * ones).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ones.dot(asm_.M * ones) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigenvectors are M-orthonormal") {
  const auto tmpl = mesh::build_template(square(Bc::Dirichlet), 16);
  const auto asm_ = assemble(mesh::instantiate(tmpl, 1.0));
  const auto spec = solve_eigs(asm_, 6);
  const Eigen::MatrixXd G = spec.U.transpose() * (asm_.M * spec.U);
  CHECK((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
  // Rayleigh quotients reproduce the eigenvalues
  for (int j = 0; j < 6; ++j) {
    const double rq = spec.U.col(j).dot(asm_.K * spec.U.col(j)) /
                      spec.U.col(j).dot(asm_.M * spec.U.col(j));
    CHECK(rq == doctest::Approx(spec.E(j)).epsilon(1e-8));
  }
}

TEST_CASE("a Dirichlet slit raises the square's ground state") {
  const double slit = ground(slit_square(0.125, Bc::Dirichlet), 16, 0.125);
  const double unslit = ground(square(Bc::Dirichlet), 16, 1.0);
  CHECK(slit > unslit + 0.5);
  // holds again after refinement
  CHECK(ground(slit_square(0.125, Bc::Dirichlet), 32, 0.125) >
        ground(square(Bc::Dirichlet), 32, 1.0) + 0.5);
}

TEST_CASE("merging the seam of a Neumann slit reproduces the unslit matrix") {
  const int res = 16;
  const auto slit_tmpl = mesh::build_template(slit_square(0.125, Bc::Neumann),
                                              res);
  const auto slit_asm = assemble(mesh::instantiate(slit_tmpl, 0.125));
  const auto flat_tmpl = mesh::build_template(square(Bc::Dirichlet), res);
  const auto flat_asm = assemble(mesh::instantiate(flat_tmpl, 1.0));

  // fold each seam duplicate onto its base DOF
  const int n = int(slit_asm.K.rows());
  std::vector<int> fold(n);
  for (int i = 0; i < n; ++i) fold[i] = i;
  for (const auto& [lo, hi] : slit_tmpl.seam_pairs)
    fold[slit_asm.node_to_free[hi]] = slit_asm.node_to_free[lo];
  std::vector<int> pack(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (fold[i] == i) pack[i] = m++;
  Eigen::MatrixXd Km = Eigen::MatrixXd::Zero(m, m), Mm = Km;
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(slit_asm.K, j); it;
         ++it)
      Km(pack[fold[it.row()]], pack[fold[j]]) += it.value();
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(slit_asm.M, j); it;
         ++it)
      Mm(pack[fold[it.row()]], pack[fold[j]]) += it.value();

  REQUIRE(m == int(flat_asm.K.rows()));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> merged(Km, Mm);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> flat(
      Eigen::MatrixXd(flat_asm.K), Eigen::MatrixXd(flat_asm.M));
  for (int j = 0; j < 8; ++j)
    CHECK(merged.eigenvalues()(j) ==
          doctest::Approx(flat.eigenvalues()(j)).epsilon(1e-10));
}

TEST_CASE("sparse shift-invert path agrees with the dense path") {
  const auto tmpl = mesh::build_template(square(Bc::Dirichlet), 40);
  const auto asm_ = assemble(mesh::instantiate(tmpl, 1.0));
  const auto dense = solve_eigs(asm_, 5);           // 1521 DOFs: dense route
  const auto sparse = solve_eigs(asm_, 5, 0);       // forced sparse route
  for (int j = 0; j < 5; ++j)
    CHECK(sparse.E(j) == doctest::Approx(dense.E(j)).epsilon(1e-9));
  CHECK(sparse.residual.maxCoeff() <= 1e-8);
}

TEST_CASE("matrix derivative: locality, Richardson rate, no-slit zero") {
  const auto tmpl = mesh::build_template(slit_square(0.125, Bc::Dirichlet), 16);
  const double t = 0.1;
  const auto d1 = matrix_derivative(tmpl, t, t / 64.0);
  const auto d2 = matrix_derivative(tmpl, t, t / 128.0);
  // rows of DOFs whose star is fully outside the motion zone vanish
  const auto asm_ = assemble(mesh::instantiate(tmpl, t));
  Eigen::MatrixXd Kd(d1.Kdot);
  for (size_t f = 0; f < asm_.free_to_node.size(); ++f) {
    const Point p = tmpl.ref_nodes[asm_.free_to_node[f]];
    const double dist = std::hypot(p.x - 0.5, p.y - 0.5);
    if (dist > 2.0 * tmpl.spec.chart_radius_r0 + 2.0 / 16.0)
      CHECK(Kd.row(f).cwiseAbs().maxCoeff() == 0.0);
  }
  // second-order differencing: halving delta shrinks the difference ~4x
  const auto d0 = matrix_derivative(tmpl, t, t / 32.0);
  const double c1 = (Eigen::MatrixXd(d0.Kdot) - Eigen::MatrixXd(d1.Kdot))
                        .cwiseAbs().maxCoeff();
  const double c2 = (Eigen::MatrixXd(d1.Kdot) - Eigen::MatrixXd(d2.Kdot))
                        .cwiseAbs().maxCoeff();
  CHECK(c1 / c2 > 3.0);
  CHECK(c1 / c2 < 5.0);

  const auto flat = mesh::build_template(square(Bc::Dirichlet), 8);
  const auto dz = matrix_derivative(flat, 0.5, 0.01);
  CHECK(Eigen::MatrixXd(dz.Kdot).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(dz.Mdot).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigenvalue derivative matches finite differences of E(t)") {
  const auto tmpl = mesh::build_template(slit_square(0.125, Bc::Dirichlet), 32);
  const double t = 0.1;
  const auto asm_ = assemble(mesh::instantiate(tmpl, t));
  const auto spec = solve_eigs(asm_, 2);
  const auto deriv = matrix_derivative(tmpl, t, t / 100.0);
  const double edot = hellmann_feynman(deriv, asm_, spec, 0);
  CHECK(edot > 0.0);  // Dirichlet slit grows the eigenvalue

  const double dt = t / 50.0;
  auto E_at = [&](double tt) {
    return solve_eigs(assemble(mesh::instantiate(tmpl, tt)), 1).E(0);
  };
  const double fd = (E_at(t + dt) - E_at(t - dt)) / (2.0 * dt);
  CHECK(std::abs(edot - fd) / std::abs(fd) < 1e-3);
}

TEST_CASE("gap guard rejects near-degenerate pairs") {
  const auto tmpl = mesh::build_template(square(Bc::Dirichlet), 8);
  const auto asm_ = assemble(mesh::instantiate(tmpl, 1.0));
  const auto deriv = matrix_derivative(tmpl, 0.5, 0.01);
  Spectrum fake;
  fake.E = Eigen::VectorXd(2);
  fake.E << 10.0, 10.0 + 1e-9;
  fake.U = Eigen::MatrixXd::Ones(asm_.K.rows(), 2);
  CHECK_THROWS_AS(hellmann_feynman(deriv, asm_, fake, 0), NumericalError);
}

#include <slitlab/mathieu.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slitlab::mathieu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tie-break rank at h = 0: cos before sin within each degenerate pair.
int class_rank(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::CosEven: return 0;
    case SymmetryClass::CosOdd: return 1;
    case SymmetryClass::SinOdd: return 2;
    case SymmetryClass::SinEven: return 3;
  }
  return 4;
}

struct BlockMode {
  double b;
  SymmetryClass cls;
  Eigen::VectorXd coeffs;  // full layout [const, cos 1..N, sin 1..N]
};

// Wavenumbers of one symmetry block up to truncation N.
std::vector<int> block_ks(SymmetryClass c, int N) {
  std::vector<int> ks;
  const int start = (c == SymmetryClass::CosEven)                            ? 0
                    : (c == SymmetryClass::SinEven)                          ? 2
                                                                             : 1;
  for (int k = start; k <= N; k += 2) ks.push_back(k);
  return ks;
}

void solve_block(SymmetryClass cls, double h, int N,
                 std::vector<BlockMode>& out) {
  const std::vector<int> ks = block_ks(cls, N);
  const int n = static_cast<int>(ks.size());
  const double h2 = h * h;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const int k = ks[a];
    double diag = static_cast<double>(k) * k + 0.5 * h2;
    // cos^2 couples k with itself for k = 1 (cos 2th * cos th and sin th).
    if (k == 1) diag += (cls == SymmetryClass::CosOdd ? 0.25 : -0.25) * h2;
    A(a, a) = diag;
    if (a + 1 < n) {
      const double off =
          (k == 0) ? h2 * std::numbers::sqrt2 / 4.0 : h2 / 4.0;
      A(a, a + 1) = A(a + 1, a) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const bool is_cos =
      cls == SymmetryClass::CosEven || cls == SymmetryClass::CosOdd;
  for (int m = 0; m < n; ++m) {
    BlockMode bm;
    bm.b = es.eigenvalues()(m);
    bm.cls = cls;
    bm.coeffs = Eigen::VectorXd::Zero(2 * N + 1);
    Eigen::VectorXd v = es.eigenvectors().col(m);
    // deterministic sign: largest-magnitude coefficient positive
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    for (int a = 0; a < n; ++a) {
      const int k = ks[a];
      if (k == 0)
        bm.coeffs(0) = v(a);
      else
        bm.coeffs(is_cos ? k : N + k) = v(a);
    }
    out.push_back(std::move(bm));
  }
}

// Diagonal and subdiagonal of one symmetry block.
void block_tridiag(SymmetryClass cls, double h, int N, Eigen::VectorXd& diag,
                   Eigen::VectorXd& sub) {
  const std::vector<int> ks = block_ks(cls, N);
  const int n = static_cast<int>(ks.size());
  const double h2 = h * h;
  diag.resize(n);
  sub.resize(std::max(n - 1, 0));
  for (int a = 0; a < n; ++a) {
    const int k = ks[a];
    double d = static_cast<double>(k) * k + 0.5 * h2;
    if (k == 1) d += (cls == SymmetryClass::CosOdd ? 0.25 : -0.25) * h2;
    diag(a) = d;
    if (a + 1 < n)
      sub(a) = (k == 0) ? h2 * std::numbers::sqrt2 / 4.0 : h2 / 4.0;
  }
}

std::vector<double> all_block_values(double h, int N) {
  std::vector<double> bs;
  Eigen::VectorXd diag, sub;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (SymmetryClass cls : {SymmetryClass::CosEven, SymmetryClass::CosOdd,
                            SymmetryClass::SinOdd, SymmetryClass::SinEven}) {
    block_tridiag(cls, h, N, diag, sub);
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int m = 0; m < diag.size(); ++m) bs.push_back(es.eigenvalues()(m));
  }
  std::sort(bs.begin(), bs.end());
  return bs;
}

std::vector<BlockMode> all_blocks(double h, int N) {
  std::vector<BlockMode> modes;
  solve_block(SymmetryClass::CosEven, h, N, modes);
  solve_block(SymmetryClass::CosOdd, h, N, modes);
  solve_block(SymmetryClass::SinOdd, h, N, modes);
  solve_block(SymmetryClass::SinEven, h, N, modes);
  std::sort(modes.begin(), modes.end(), [](const BlockMode& a, const BlockMode& b) {
    if (a.b != b.b) return a.b < b.b;
    return class_rank(a.cls) < class_rank(b.cls);
  });
  return modes;
}

}  // namespace

const char* to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::CosEven: return "cos-even";
    case SymmetryClass::CosOdd: return "cos-odd";
    case SymmetryClass::SinOdd: return "sin-odd";
    case SymmetryClass::SinEven: return "sin-even";
  }
  return "?";
}

std::vector<AngularMode> angular_spectrum(double h, int n_modes,
                                          int truncation_N) {
  if (truncation_N < 4 * n_modes + 16)
    throw ResolutionError("angular_spectrum: truncation_N < 4 n_modes + 16");
  const std::vector<BlockMode> coarse = all_blocks(h, truncation_N);
  const std::vector<BlockMode> fine = all_blocks(h, 2 * truncation_N);
  if (static_cast<int>(coarse.size()) < n_modes)
    throw ResolutionError("angular_spectrum: n_modes exceeds truncation");
  std::vector<AngularMode> out;
  for (int i = 0; i < n_modes; ++i) {
    const double b = coarse[i].b;
    if (std::abs(b - fine[i].b) > 1e-10 * (1.0 + std::abs(b)))
      throw ResolutionError("angular_spectrum: truncation not converged");
    AngularMode m;
    m.index = i;
    m.h = h;
    m.b = b;
    m.symmetry_class = coarse[i].cls;
    m.fourier_coeffs = coarse[i].coeffs;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> angular_values(double h, int n_modes, int truncation_N) {
  if (truncation_N < 4 * n_modes + 16)
    throw ResolutionError("angular_values: truncation_N < 4 n_modes + 16");
  const std::vector<double> coarse = all_block_values(h, truncation_N);
  const std::vector<double> fine = all_block_values(h, 2 * truncation_N);
  if (static_cast<int>(coarse.size()) < n_modes)
    throw ResolutionError("angular_values: n_modes exceeds truncation");
  std::vector<double> out(coarse.begin(), coarse.begin() + n_modes);
  for (int i = 0; i < n_modes; ++i)
    if (std::abs(out[i] - fine[i]) > 1e-10 * (1.0 + std::abs(out[i])))
      throw ResolutionError("angular_values: truncation not converged");
  return out;
}

double angular_eval(const AngularMode& mode, double theta) {
  const int N = (static_cast<int>(mode.fourier_coeffs.size()) - 1) / 2;
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double v = mode.fourier_coeffs(0) / std::sqrt(kTwoPi);
  for (int k = 1; k <= N; ++k) {
    const double c = mode.fourier_coeffs(k);
    const double s = mode.fourier_coeffs(N + k);
    if (c != 0.0) v += c * inv_sqrt_pi * std::cos(k * theta);
    if (s != 0.0) v += s * inv_sqrt_pi * std::sin(k * theta);
  }
  return v;
}

namespace {

struct IntegrateResult {
  double u, du, log_scale;
  int nodes;
};

// RK4 with running renormalization; also records samples at `record` points
// when non-null (record must be uniform including both endpoints).
IntegrateResult integrate_fixed(double h, double b, Bc bc, double x_max,
                                long n_steps, RadialSolution* record,
                                long n_out) {
  const double h2 = h * h;
  auto f = [&](double x, double u, double du, double& out_u, double& out_du) {
    const double c = std::cosh(x);
    out_u = du;
    out_du = (b - h2 * c * c) * u;
  };
  double u = bc == Bc::Dirichlet ? 0.0 : 1.0;
  double du = bc == Bc::Dirichlet ? 1.0 : 0.0;
  double ls = 0.0;
  int nodes = 0;
  double prev_sign = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
  const double dx = x_max / static_cast<double>(n_steps);
  long rec_every = record ? n_steps / (n_out - 1) : 0;
  if (record) {
    record->grid.assign(1, 0.0);
    record->values.assign(1, u);
    record->derivs.assign(1, du);
    record->log_scale.assign(1, 0.0);
  }
  for (long s = 0; s < n_steps; ++s) {
    const double x = dx * static_cast<double>(s);
    double k1u, k1d, k2u, k2d, k3u, k3d, k4u, k4d;
    f(x, u, du, k1u, k1d);
    f(x + 0.5 * dx, u + 0.5 * dx * k1u, du + 0.5 * dx * k1d, k2u, k2d);
    f(x + 0.5 * dx, u + 0.5 * dx * k2u, du + 0.5 * dx * k2d, k3u, k3d);
    f(x + dx, u + dx * k3u, du + dx * k3d, k4u, k4d);
    u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du += dx / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    const double mag = std::max(std::abs(u), std::abs(du));
    if (mag > 1e100) {
      u /= mag;
      du /= mag;
      ls += std::log(mag);
    }
    const double sign = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    if (sign != 0.0 && prev_sign != 0.0 && sign != prev_sign &&
        s + 1 < n_steps)
      ++nodes;
    if (sign != 0.0) prev_sign = sign;
    if (record && (s + 1) % rec_every == 0) {
      record->grid.push_back(dx * static_cast<double>(s + 1));
      record->values.push_back(u);
      record->derivs.push_back(du);
      record->log_scale.push_back(ls);
    }
  }
  return {u, du, ls, nodes};
}

double endpoint_diff(const IntegrateResult& a, const IntegrateResult& b) {
  const double scale = std::exp(a.log_scale - b.log_scale);
  const double nu = a.u * scale - b.u;
  const double nd = a.du * scale - b.du;
  const double denom = std::hypot(b.u, b.du);
  return std::hypot(nu, nd) / (denom > 0.0 ? denom : 1.0);
}

long converged_steps(double h, double b, Bc bc, double x_max, double tol,
                     IntegrateResult& final) {
  long n = std::max<long>(256, static_cast<long>(64.0 * x_max *
      std::sqrt(1.0 + std::abs(b) + h * h * std::cosh(x_max) *
                std::cosh(x_max))));
  IntegrateResult coarse = integrate_fixed(h, b, bc, x_max, n, nullptr, 0);
  for (int iter = 0; iter < 16; ++iter) {
    IntegrateResult fine =
        integrate_fixed(h, b, bc, x_max, 2 * n, nullptr, 0);
    if (endpoint_diff(coarse, fine) < tol) {
      final = fine;
      return 2 * n;
    }
    coarse = fine;
    n *= 2;
    if (n > (1L << 24))
      throw NumericalError("radial_solve: step-size underflow before x = " +
                           std::to_string(x_max));
  }
  final = coarse;
  return n;
}

}  // namespace

RadialSolution radial_solve(int index, double h, double b, Bc bc,
                            double x_max, double tol, int n_out) {
  if (!(x_max > 0.0) || !(tol > 0.0))
    throw ConfigError("radial_solve: x_max and tol must be positive");
  IntegrateResult end;
  long n = converged_steps(h, b, bc, x_max, tol, end);
  // round up to a multiple of n_out - 1 so samples fall on steps
  const long m = n_out - 1;
  n = ((n + m - 1) / m) * m;
  RadialSolution sol;
  sol.index = index;
  sol.h = h;
  sol.b = b;
  sol.bc_at_zero = bc;
  integrate_fixed(h, b, bc, x_max, n, &sol, n_out);
  return sol;
}

RadialEndpoint radial_endpoint(double h, double b, Bc bc, double x_max,
                               double tol) {
  IntegrateResult end;
  converged_steps(h, b, bc, x_max, tol, end);
  return {end.u, end.du, end.log_scale, end.nodes};
}

Expansion mathieu_expand(const Eigen::MatrixXd& samples, double h,
                         int n_modes) {
  const int m = static_cast<int>(samples.cols());
  if (m < 8 * n_modes)
    throw ResolutionError("mathieu_expand: need >= 8 n_modes theta points");
  const int N = std::max(4 * n_modes + 16, 32);
  Expansion ex;
  ex.modes = angular_spectrum(h, n_modes, N);
  Eigen::MatrixXd V(m, n_modes);
  for (int j = 0; j < m; ++j) {
    const double theta = kTwoPi * j / m;
    for (int i = 0; i < n_modes; ++i) V(j, i) = angular_eval(ex.modes[i], theta);
  }
  ex.coeffs = samples * V * (kTwoPi / m);
  return ex;
}

double Expansion::parseval_defect(const Eigen::MatrixXd& samples,
                                  const Eigen::VectorXd& x_weights) const {
  const int m = static_cast<int>(samples.cols());
  const double dtheta = kTwoPi / m;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < samples.rows(); ++k) {
    const double direct = samples.row(k).squaredNorm() * dtheta;
    const double series = coeffs.row(k).squaredNorm();
    num += x_weights(k) * std::abs(direct - series);
    den += x_weights(k) * direct;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace slitlab::mathieu

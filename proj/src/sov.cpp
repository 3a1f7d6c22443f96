#include <slitlab/sov.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>

namespace slitlab::sov {

using mathieu::RadialEndpoint;

namespace {

constexpr double kScanTol = 1e-6;   // bracketing pass
constexpr double kShootTol = 1e-9;  // bisection refinement
constexpr double kRootRelTol = 1e-9;

// b_i(h) for a single index, retrying with a doubled truncation if the
// convergence guard trips at large h.
double angular_b(int i, double h) {
  int N = std::max(64, 4 * (i + 1) + 16 + int(4.0 * h));
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      return mathieu::angular_values(h, i + 1, N).back();
    } catch (const ResolutionError&) {
      N *= 2;
    }
  }
  throw ResolutionError("angular spectrum failed to converge at h = " +
                        std::to_string(h));
}

struct Shot {
  double residual = 0.0;
  int nodes = 0;
};

Shot shoot(const SovProblem& prob, double E, double tol = kShootTol) {
  const double h = prob.t * std::sqrt(std::max(E, 0.0));
  const double b = angular_b(prob.index, h);
  RadialEndpoint end =
      mathieu::radial_endpoint(h, b, prob.slit_bc, prob.x0, tol);
  const double omega = std::sqrt(1.0 + std::abs(b));
  Shot s;
  if (prob.outer_bc == Bc::Dirichlet) {
    s.residual = end.u / std::hypot(end.u, end.du / omega);
    s.nodes = end.nodes;
  } else {
    s.residual = end.du / std::hypot(end.du, end.u * omega);
    s.nodes = end.nodes;
  }
  return s;
}

}  // namespace

void SovProblem::validate() const {
  if (!(t > 0.0)) throw ConfigError("sov: slit half-length t must be positive");
  if (!(x0 > 0.0)) throw ConfigError("sov: outer radius x0 must be positive");
}

double shoot_residual(const SovProblem& prob, double E) {
  prob.validate();
  if (E < 0.0) throw ConfigError("sov: trial eigenvalue must be nonnegative");
  return shoot(prob, E).residual;
}

std::vector<SovEigenvalue> eigenvalues_sov(const SovProblem& prob, double E_max,
                                           int per_index_count) {
  prob.validate();
  if (!std::isfinite(E_max) || E_max <= 0.0)
    throw ConfigError("sov: E_max must be finite and positive");

  const double ch = std::cosh(prob.x0);
  // below-barrier cutoff: with b_i(h) >= b_i(0), the potential
  // b - h^2 cosh^2 x stays positive on [0, x0] for every E <= E_max once
  // b_i(0) clears t^2 E_max cosh^2 x0, so no further roots can appear
  int n_index = 0;
  while (true) {
    const double b0 = double((n_index + 1) / 2) * double((n_index + 1) / 2);
    if (b0 > prob.t * prob.t * E_max * ch * ch) break;
    ++n_index;
  }

  auto scan_index = [&prob, E_max, per_index_count](int i) {
    std::vector<SovEigenvalue> roots;
    SovProblem p = prob;
    p.index = i;
    int found = 0;
    double E_prev = 1e-6;
    Shot prev = shoot(p, E_prev, kScanTol);
    while (E_prev < E_max && found < per_index_count) {
      const double E_next =
          std::min(E_max, E_prev + std::min(1.0, E_prev) / 20.0);
      Shot next = shoot(p, E_next, kScanTol);
      if (prev.residual == 0.0 || prev.residual * next.residual < 0.0) {
        double lo = E_prev, hi = E_next;
        // re-evaluate the bracket at the tight tolerance; a sign change that
        // does not survive the tighter integration was noise near a tangency
        double r_lo = shoot(p, lo).residual;
        const double r_hi = shoot(p, hi).residual;
        if (r_lo != 0.0 && r_lo * r_hi > 0.0) {
          E_prev = E_next;
          prev = next;
          continue;
        }
        while (hi - lo > kRootRelTol * hi) {
          const double mid = 0.5 * (lo + hi);
          const double r_mid = shoot(p, mid).residual;
          if (r_mid == 0.0) {
            lo = hi = mid;
            break;
          }
          if (r_lo * r_mid < 0.0)
            hi = mid;
          else {
            lo = mid;
            r_lo = r_mid;
          }
        }
        const double E_root = 0.5 * (lo + hi);
        Shot at_root = shoot(p, E_root);
        if (at_root.nodes != found)
          std::fprintf(stderr,
                       "sov: warning: index %d root %d has %d radial nodes "
                       "(possible missed root)\n",
                       i, found, at_root.nodes);
        roots.push_back({E_root, i, at_root.nodes, at_root.residual});
        ++found;
      }
      E_prev = E_next;
      prev = next;
      if (E_next >= E_max) break;
    }
    return roots;
  };

  // each angular index is independent; fan out across the machine
  std::vector<std::future<std::vector<SovEigenvalue>>> jobs;
  jobs.reserve(n_index);
  for (int i = 0; i < n_index; ++i)
    jobs.push_back(std::async(std::launch::async, scan_index, i));
  std::vector<SovEigenvalue> out;
  for (auto& j : jobs)
    for (const auto& e : j.get()) out.push_back(e);

  std::sort(out.begin(), out.end(),
            [](const SovEigenvalue& a, const SovEigenvalue& b) {
              return a.E < b.E;
            });
  return out;
}

}  // namespace slitlab::sov

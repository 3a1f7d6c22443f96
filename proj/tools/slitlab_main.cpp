// Batch front door: dispatch experiments and emit CSV/SVG artifacts.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#include <CLI11.hpp>

#include <slitlab/analysis.hpp>
#include <slitlab/domain.hpp>
#include <slitlab/fem.hpp>
#include <slitlab/io.hpp>
#include <slitlab/mathieu.hpp>
#include <slitlab/mesh.hpp>
#include <slitlab/sov.hpp>
#include <slitlab/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace slitlab;

struct Artifacts {
  std::string dir;
  std::vector<std::string> written;
  std::vector<std::pair<std::string, std::string>> manifest;

  std::string path(const std::string& name) const { return dir + "/" + name; }
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
    io::write_csv(path(name), header, rows);
    written.push_back(path(name));
  }
  void svg(const std::string& name, const std::vector<io::Series>& series,
           const std::string& title) {
    io::write_svg_lines(path(name), series, title);
    written.push_back(path(name));
  }
  void note(const std::string& k, double v) { manifest.emplace_back(k, io::fmt(v)); }
  void finish() {
    io::write_manifest(path("manifest.txt"), manifest);
  }
  void discard() {
    for (const auto& p : written) std::remove(p.c_str());
  }
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw ConfigError("bad t grid entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty t grid");
  return out;
}

Bc parse_bc_flag(const std::string& s) {
  if (s == "dirichlet") return Bc::Dirichlet;
  if (s == "neumann") return Bc::Neumann;
  throw ConfigError("boundary condition must be dirichlet or neumann");
}

void run_mathieu(Artifacts& art, double h, int modes, int truncation) {
  if (truncation <= 0)
    truncation = std::max(64, 4 * modes + 16 + static_cast<int>(4 * h));
  const auto spectrum = mathieu::angular_spectrum(h, modes, truncation);
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : spectrum)
    rows.push_back({std::to_string(m.index), io::fmt(m.h), io::fmt(m.b),
                    mathieu::to_string(m.symmetry_class)});
  art.csv("mathieu.csv", {"i", "h", "b", "class"}, rows);
}

void run_sov(Artifacts& art, const std::string& domain_path, double e_max,
             int per_index) {
  const DomainSpec spec = load_domain(domain_path);
  if (spec.kind != OuterKind::ConfocalEllipse)
    throw ConfigError("sov requires a confocal-ellipse domain");
  sov::SovProblem prob;
  prob.t = spec.slits[0].half_length_t;
  prob.x0 = spec.x0;
  prob.slit_bc = spec.slits[0].condition;
  prob.outer_bc = spec.outer_bc[0];
  const auto eigs = sov::eigenvalues_sov(prob, e_max, per_index);
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : eigs)
    rows.push_back({std::to_string(e.index), io::fmt(e.E),
                    std::to_string(e.nodes), io::fmt(e.residual)});
  art.csv("sov.csv", {"i", "E", "nodes", "residual"}, rows);
}

double default_t(const mesh::MeshTemplate& tmpl) {
  return tmpl.spec.slits.empty() ? 1.0
                                 : tmpl.spec.slits[0].half_length_t;
}

void run_fem_solve(Artifacts& art, const std::string& domain_path,
                   int resolution, double t, int k, bool dump) {
  const DomainSpec spec = load_domain(domain_path);
  const auto tmpl = mesh::build_template(spec, resolution);
  if (t <= 0.0) t = default_t(tmpl);
  const auto inst = mesh::instantiate(tmpl, t);
  const auto asm_ = fem::assemble(inst);
  const auto sp = fem::solve_eigs(asm_, k);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < sp.E.size(); ++i)
    rows.push_back({std::to_string(i), io::fmt(sp.E(i)),
                    io::fmt(sp.residual(i))});
  art.csv("spectrum.csv", {"k", "E", "residual"}, rows);
  if (dump) {
    std::ostringstream os;
    mesh::dump_mesh(inst, os);
    io::write_text(art.path("mesh.txt"), os.str());
    art.written.push_back(art.path("mesh.txt"));
  }
}

analysis::BranchSet tracked(const std::string& domain_path, int resolution,
                            const std::string& grid_str, int k,
                            mesh::MeshTemplate& tmpl_out) {
  const DomainSpec spec = load_domain(domain_path);
  tmpl_out = mesh::build_template(spec, resolution);
  return analysis::track_branches(tmpl_out, parse_grid(grid_str), k);
}

void write_branches(Artifacts& art, const analysis::BranchSet& bs) {
  const int n_t = static_cast<int>(bs.t_grid.size());
  const int k = static_cast<int>(bs.E.cols());
  std::vector<std::vector<std::string>> rows;
  for (int it = 0; it < n_t; ++it)
    for (int j = 0; j < k; ++j)
      rows.push_back({io::fmt(bs.t_grid[it]), std::to_string(j),
                      io::fmt(bs.E(it, j)),
                      it == 0 ? "" : io::fmt(bs.overlap(it, j))});
  art.csv("branches.csv", {"t", "branch", "E", "overlap"}, rows);
  if (n_t >= 2) {
    std::vector<io::Series> series(k);
    for (int j = 0; j < k; ++j) {
      series[j].label = "branch " + std::to_string(j);
      for (int it = 0; it < n_t; ++it) {
        series[j].x.push_back(bs.t_grid[it]);
        series[j].y.push_back(bs.E(it, j));
      }
    }
    art.svg("branches.svg", series, "eigenvalue branches vs t");
  }
}

void run_track(Artifacts& art, const std::string& domain_path, int resolution,
               const std::string& grid_str, int k) {
  mesh::MeshTemplate tmpl;
  const auto bs = tracked(domain_path, resolution, grid_str, k, tmpl);
  write_branches(art, bs);
  if (bs.t_grid.size() >= 4) {
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j < bs.E.cols(); ++j) {
      std::vector<double> e(bs.E.col(j).data(),
                            bs.E.col(j).data() + bs.t_grid.size());
      const auto fit = analysis::extrapolate_limit(bs.t_grid, e);
      rows.push_back({std::to_string(j), io::fmt(fit.E0), io::fmt(fit.c),
                      io::fmt(fit.p), io::fmt(fit.residual),
                      fit.accepted ? "1" : "0", io::fmt(fit.t2E.back())});
    }
    art.csv("fits.csv",
            {"branch", "E0", "c", "p", "residual", "accepted", "t2E_min"},
            rows);
  }
  for (const auto& w : bs.warnings) std::cerr << "warning: " << w << "\n";
}

void run_audit(Artifacts& art, const std::string& domain_path, int resolution,
               const std::string& grid_str, int k, double r_star) {
  mesh::MeshTemplate tmpl;
  const auto bs = tracked(domain_path, resolution, grid_str, k, tmpl);
  write_branches(art, bs);
  const auto pts = analysis::variation_audit(tmpl, bs, r_star);
  const auto gaps = analysis::gap_scan(bs, 0.0);
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : pts) {
    double min_gap = 0.0;
    for (const auto& g : gaps)
      if (g.t == p.t) min_gap = g.min_gap;
    rows.push_back({io::fmt(p.t), std::to_string(p.branch), io::fmt(p.E),
                    io::fmt(p.t * p.t * p.E), io::fmt(p.edot_hf),
                    io::fmt(p.edot_fd), io::fmt(p.rel_err),
                    io::fmt(p.lambda), io::fmt(p.slack), io::fmt(p.kappa),
                    io::fmt(p.forms.q), io::fmt(p.forms.N),
                    io::fmt(p.forms.qdot), io::fmt(p.forms.Ndot),
                    io::fmt(p.mass_ratio), io::fmt(min_gap),
                    p.skipped ? "1" : "0"});
  }
  art.csv("audit.csv",
          {"t", "branch", "E", "t2E", "edot_hf", "edot_fd", "rel_err",
           "lambda", "slack", "kappa", "qU", "NU", "qdotU", "NdotU",
           "mass_ratio", "min_gap", "skipped"},
          rows);
}

void run_symmetry(Artifacts& art, double a, double slit_t,
                  const std::string& bc, int resolution, double lambda_cut) {
  const auto rep = analysis::symmetry_reduction_check(
      a, slit_t, parse_bc_flag(bc), resolution, lambda_cut);
  std::vector<std::vector<std::string>> rows;
  const size_t n = std::min(rep.full.size(), rep.merged.size());
  for (size_t i = 0; i < n; ++i)
    rows.push_back({std::to_string(i), io::fmt(rep.full[i]),
                    io::fmt(rep.merged[i])});
  art.csv("symmetry.csv", {"i", "full", "merged"}, rows);
  art.note("max_rel_diff", rep.max_rel_diff);
  art.note("count_full", rep.count_full);
  art.note("count_merged", rep.count_merged);
  std::cout << "max_rel_diff=" << io::fmt(rep.max_rel_diff)
            << " count_full=" << rep.count_full
            << " count_merged=" << rep.count_merged << "\n";
}

void run_gap_scan(Artifacts& art, const std::string& domain_path,
                  int resolution, const std::string& grid_str, int k,
                  double threshold) {
  mesh::MeshTemplate tmpl;
  const auto bs = tracked(domain_path, resolution, grid_str, k, tmpl);
  const auto rows_scan = analysis::gap_scan(bs, threshold);
  std::vector<std::vector<std::string>> rows;
  io::Series gap_series;
  gap_series.label = "min gap";
  for (const auto& r : rows_scan) {
    rows.push_back({io::fmt(r.t), io::fmt(r.min_gap), std::to_string(r.arg),
                    r.candidate ? "1" : "0"});
    gap_series.x.push_back(r.t);
    gap_series.y.push_back(r.min_gap);
  }
  art.csv("gaps.csv", {"t", "min_gap", "arg", "candidate"}, rows);
  if (rows_scan.size() >= 2)
    art.svg("gaps.svg", {gap_series}, "minimal spectral gap vs t");
}

void run_cross_validate(Artifacts& art, double t, double r_outer,
                        const std::string& slit_bc,
                        const std::string& outer_bc, int resolution, int k) {
  sov::SovProblem prob;
  prob.t = t;
  prob.x0 = std::asinh(r_outer / t);
  prob.slit_bc = parse_bc_flag(slit_bc);
  prob.outer_bc = parse_bc_flag(outer_bc);

  DomainSpec spec;
  spec.kind = OuterKind::ConfocalEllipse;
  spec.x0 = prob.x0;
  spec.chart_radius_r0 = 0.49 * t * std::sinh(prob.x0);
  SlitSpec slit;
  slit.half_length_t = t;
  slit.condition = prob.slit_bc;
  spec.slits.push_back(slit);
  spec.outer_bc[0] = prob.outer_bc;

  auto fem_vals = [&](int res) {
    const auto tmpl = mesh::build_template(spec, res);
    const auto asm_ = fem::assemble(mesh::instantiate(tmpl, t));
    return fem::solve_eigs(asm_, k).E;
  };
  const Eigen::VectorXd coarse = fem_vals(resolution);
  const Eigen::VectorXd fine = fem_vals(2 * resolution);
  const double e_max = 1.3 * fine(k - 1) + 1.0;
  auto eigs = sov::eigenvalues_sov(prob, e_max, k);
  if (static_cast<int>(eigs.size()) < k)
    throw NumericalError("cross-validate: separation solver found too few");
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < k; ++i) {
    const double rel = std::abs(fine(i) - eigs[i].E) / eigs[i].E;
    rows.push_back({std::to_string(i), io::fmt(eigs[i].E), io::fmt(coarse(i)),
                    io::fmt(fine(i)), io::fmt(rel)});
  }
  art.csv("cross.csv", {"i", "E_sov", "E_fem", "E_fem_fine", "rel_diff"},
          rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace eigenvalue laboratory for planar slit domains"};
  app.require_subcommand(1);

  std::string out_dir = ".", domain_path, grid_str, bc = "dirichlet";
  std::string outer_bc = "dirichlet";
  double h = 0.1, e_max = 50.0, t = -1.0, a = std::sqrt(2.0);
  double lambda_cut = 100.0, threshold = 0.5, r_star = -1.0, r_outer = 1.0;
  int modes = 5, truncation = 0, per_index = 8, resolution = 32, k = 10;
  bool dump = false;

  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* c_mathieu = app.add_subcommand("mathieu", "angular eigenvalue table");
  c_mathieu->set_help_flag("--help", "print help");  // frees --h
  c_mathieu->add_option("--h", h, "coupling h")->required();
  c_mathieu->add_option("--modes", modes, "number of modes");
  c_mathieu->add_option("--truncation", truncation, "Fourier truncation");

  auto* c_sov = app.add_subcommand("sov", "separated slit-ellipse solve");
  c_sov->add_option("--domain", domain_path, "domain file")->required();
  c_sov->add_option("--emax", e_max, "eigenvalue cutoff");
  c_sov->add_option("--per-index", per_index, "radial roots per index");

  auto* c_fem = app.add_subcommand("fem-solve", "finite element solve");
  c_fem->add_option("--domain", domain_path, "domain file")->required();
  c_fem->add_option("--resolution", resolution, "cells per unit length");
  c_fem->add_option("--t", t, "slit half-length (default: reference)");
  c_fem->add_option("--k", k, "eigenpair count");
  c_fem->add_flag("--dump-mesh", dump, "also write mesh.txt");

  auto* c_track = app.add_subcommand("track", "eigenbranch continuation");
  c_track->add_option("--domain", domain_path, "domain file")->required();
  c_track->add_option("--resolution", resolution, "cells per unit length");
  c_track->add_option("--t-grid", grid_str, "decreasing t list")->required();
  c_track->add_option("--k", k, "branch count");

  auto* c_audit = app.add_subcommand("audit", "derivative and annulus audit");
  c_audit->add_option("--domain", domain_path, "domain file")->required();
  c_audit->add_option("--resolution", resolution, "cells per unit length");
  c_audit->add_option("--t-grid", grid_str, "decreasing t list")->required();
  c_audit->add_option("--k", k, "branch count");
  c_audit->add_option("--r-star", r_star, "mass window radius");

  auto* c_sym = app.add_subcommand("symmetry-check", "midline reduction");
  c_sym->add_option("--a", a, "rectangle width");
  c_sym->add_option("--slit-t", t, "slit half-length")->required();
  c_sym->add_option("--slit-bc", bc, "dirichlet|neumann");
  c_sym->add_option("--resolution", resolution, "cells per unit length");
  c_sym->add_option("--lambda", lambda_cut, "counting threshold");

  auto* c_gap = app.add_subcommand("gap-scan", "spectral gap scan");
  c_gap->add_option("--domain", domain_path, "domain file")->required();
  c_gap->add_option("--resolution", resolution, "cells per unit length");
  c_gap->add_option("--t-grid", grid_str, "decreasing t list")->required();
  c_gap->add_option("--k", k, "branch count");
  c_gap->add_option("--threshold", threshold, "candidate gap threshold");

  auto* c_cross = app.add_subcommand("cross-validate",
                                     "separated vs finite element solve");
  c_cross->add_option("--t", t, "slit half-length")->required();
  c_cross->add_option("--r0", r_outer, "outer radius t*sinh(x0)");
  c_cross->add_option("--slit-bc", bc, "dirichlet|neumann");
  c_cross->add_option("--outer-bc", outer_bc, "dirichlet|neumann");
  c_cross->add_option("--resolution", resolution, "coarse FEM resolution");
  c_cross->add_option("--k", k, "eigenvalue count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Artifacts art;
  art.dir = out_dir;
  art.manifest.emplace_back("tool", "slitlab");
  art.manifest.emplace_back("version", "1.0.0");
  for (const auto* sub :
       {c_mathieu, c_sov, c_fem, c_track, c_audit, c_sym, c_gap, c_cross})
    if (sub->parsed()) {
      art.manifest.emplace_back("subcommand", sub->get_name());
      for (const auto* opt : sub->get_options())
        if (!opt->results().empty())
          art.manifest.emplace_back(opt->get_name(), opt->results().front());
    }

  try {
    if (c_mathieu->parsed()) run_mathieu(art, h, modes, truncation);
    else if (c_sov->parsed()) run_sov(art, domain_path, e_max, per_index);
    else if (c_fem->parsed())
      run_fem_solve(art, domain_path, resolution, t, k, dump);
    else if (c_track->parsed())
      run_track(art, domain_path, resolution, grid_str, k);
    else if (c_audit->parsed())
      run_audit(art, domain_path, resolution, grid_str, k, r_star);
    else if (c_sym->parsed())
      run_symmetry(art, a, t, bc, resolution, lambda_cut);
    else if (c_gap->parsed())
      run_gap_scan(art, domain_path, resolution, grid_str, k, threshold);
    else if (c_cross->parsed())
      run_cross_validate(art, t, r_outer, bc, outer_bc, resolution, k);
    art.finish();
  } catch (const ConfigError& e) {
    art.discard();
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    art.discard();
    std::cerr << "numerical failure: " << e.what() << "\n";
    try {
      io::write_text(art.path("error.txt"),
                     std::string("numerical failure\n") + e.what() + "\n");
    } catch (...) {
    }
    return 3;
  }
  return 0;
}

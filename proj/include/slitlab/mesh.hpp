#pragma once

#include <slitlab/domain.hpp>
#include <slitlab/geometry.hpp>
#include <slitlab/types.hpp>

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

namespace slitlab::mesh {

/// Diagonal pattern of a structured rectangle mesh.  Mirrored flips the
/// diagonal across the horizontal midline so a midline reflection maps the
/// mesh onto itself; Slash uses one orientation everywhere and coincides
/// with the lower half of a Mirrored mesh of doubled height.
enum class DiagMode { Mirrored, Slash };

struct NodeTag {
  unsigned edge_mask = 0;  // bit e set: node lies on outer edge e
  int slit = -1;           // owning slit, -1 for none
  geometry::SlitSide side = geometry::SlitSide::Top;
};

/// Fixed-topology triangulation of the reference (t = t_ref) configuration.
/// Interior slit nodes are duplicated: the base node keeps the lower face,
/// the duplicate carries the upper face; tips are shared.
struct MeshTemplate {
  DomainSpec spec;  // slit geometry snapped to the grid
  int resolution = 0;
  std::vector<Point> ref_nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<NodeTag> tags;
  std::vector<std::pair<int, int>> seam_pairs;  // (lower id, upper id)
  std::vector<int> tip_nodes;
};

struct TriGeom {
  double area = 0.0;
  double gx[3] = {0, 0, 0};  // hat-function gradients
  double gy[3] = {0, 0, 0};
};

struct MeshInstance {
  const MeshTemplate* tmpl = nullptr;
  double t = 0.0;
  std::vector<Point> nodes;
  std::vector<TriGeom> geom;
};

MeshTemplate build_template(const DomainSpec& spec, int resolution,
                            DiagMode diag = DiagMode::Mirrored);

/// Node positions at slit half-length t via the pulled-back motion map;
/// requires 0 < t <= t_ref for every slit.  Throws NumericalError if any
/// triangle area becomes nonpositive.
MeshInstance instantiate(const MeshTemplate& tmpl, double t);

/// Text dump: "n id x y tag", "t a b c", "s id1 id2" lines.
void dump_mesh(const MeshInstance& inst, std::ostream& os);

double total_area(const MeshInstance& inst);

}  // namespace slitlab::mesh

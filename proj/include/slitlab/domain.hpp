#pragma once

#include <slitlab/types.hpp>

#include <string>
#include <vector>

namespace slitlab {

struct SlitSpec {
  Point center;
  double angle = 0.0;          // radians; generator snaps to 0 or pi/2
  double half_length_t = 0.0;  // > 0
  Bc condition = Bc::Neumann;  // same condition on both faces
};

enum class OuterKind { Rectangle, ConfocalEllipse };

/// Per-edge boundary-condition override on a sub-segment of an outer edge.
/// `lo`/`hi` are arc coordinates along the edge (x for horizontal edges,
/// y for vertical edges).
struct EdgeSegment {
  int edge = 0;  // 0=left 1=right 2=bottom 3=top
  double lo = 0.0;
  double hi = 0.0;
  Bc bc = Bc::Neumann;
};

struct DomainSpec {
  OuterKind kind = OuterKind::Rectangle;
  double a = 1.0;   // rectangle width
  double b = 1.0;   // rectangle height
  double x0 = 1.0;  // elliptical radius of a confocal-ellipse outer boundary
  std::vector<SlitSpec> slits;
  Bc outer_bc[4] = {Bc::Dirichlet, Bc::Dirichlet, Bc::Dirichlet,
                    Bc::Dirichlet};  // left,right,bottom,top; [0] for ellipse
  double chart_radius_r0 = 0.25;
  std::vector<EdgeSegment> edge_segments;

  /// Throws ConfigError on violated invariants (slit clearance, overlap, ...).
  void validate() const;

  /// Boundary condition at arc coordinate `coord` of outer edge `edge`.
  /// Segments override the edge default on their closed range; at a point
  /// covered by several segments Dirichlet wins.
  Bc edge_bc(int edge, double coord) const;
};

DomainSpec load_domain(const std::string& path);
void save_domain(const DomainSpec& spec, const std::string& path);
DomainSpec parse_domain(const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace slitlab

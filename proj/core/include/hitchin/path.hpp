#pragma once

#include <span>
#include <variant>
#include <vector>

#include "hitchin/types.hpp"

namespace hitchin {

/// Straight segment from a to b.
struct LineSegment {
  cplx a, b;
};

/// Circular arc around `center`; the angle runs linearly from theta0 to theta1
/// (theta1 > theta0 is counterclockwise).
struct ArcSegment {
  cplx center;
  double radius;
  double theta0, theta1;
};

/// Segment that ends exactly at a branch x-value, parametrized as
/// x(s) = branch + (from - branch) s^2 with s running from 1 to 0. The square
/// makes integrands with inverse-square-root behaviour at the end smooth in s.
struct BranchEndSegment {
  cplx from, branch;
};

using Segment = std::variant<LineSegment, ArcSegment, BranchEndSegment>;

/// Position and velocity of a segment at parameter t in [0, 1].
cplx segment_point(const Segment& s, double t);
cplx segment_velocity(const Segment& s, double t);
double segment_length(const Segment& s);
/// Minimum distance between the segment and a point. For a BranchEndSegment the
/// designated branch endpoint is excluded when it coincides with `p`.
double segment_distance(const Segment& s, cplx p);

/// A contiguous path in the complex x-plane built from line and arc segments.
class XPath {
 public:
  XPath() = default;
  XPath(std::vector<Segment> segments, double clearance);

  static XPath line(cplx a, cplx b, double clearance) { return XPath({LineSegment{a, b}}, clearance); }
  /// Full counterclockwise circle of radius r around c starting at c + r e^{i theta0}.
  static XPath circle(cplx c, double r, double theta0, double clearance);
  /// Closed loop from `base`: out along the ray to `target`, once around it
  /// counterclockwise at radius r, and back to `base`.
  static XPath petal(cplx base, cplx target, double r, double clearance);

  const std::vector<Segment>& segments() const { return segments_; }
  double clearance() const { return clearance_; }
  bool empty() const { return segments_.empty(); }
  cplx start() const;
  cplx end() const;
  double length() const;
  XPath reversed() const;
  XPath then(const XPath& other) const;
  /// Smallest distance from the path to any of the given points.
  double min_distance(std::span<const cplx> pts) const;

 private:
  std::vector<Segment> segments_;
  double clearance_ = 0.0;
};

/// Straight path from a to b with circular detours of radius `radius[j]` around
/// each obstacle the segment passes too close to. `major_side` selects the
/// longer arc of each detour instead of the shorter one.
XPath detoured_line(cplx a, cplx b, std::span<const cplx> obstacles, std::span<const double> radius,
                    double clearance, bool major_side = false);

}  // namespace hitchin

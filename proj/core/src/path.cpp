#include "hitchin/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hitchin {

namespace {

double point_segment_distance(cplx a, cplx b, cplx p) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(std::real((p - a) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

struct SegmentOps {
  double t;
  cplx operator()(const LineSegment& s) const { return s.a + t * (s.b - s.a); }
  cplx operator()(const ArcSegment& s) const {
    return s.center + s.radius * std::polar(1.0, s.theta0 + t * (s.theta1 - s.theta0));
  }
  cplx operator()(const BranchEndSegment& s) const {
    const double u = 1.0 - t;
    return s.branch + (s.from - s.branch) * (u * u);
  }
};

struct SegmentVel {
  double t;
  cplx operator()(const LineSegment& s) const { return s.b - s.a; }
  cplx operator()(const ArcSegment& s) const {
    const double w = s.theta1 - s.theta0;
    return kI * w * s.radius * std::polar(1.0, s.theta0 + t * w);
  }
  cplx operator()(const BranchEndSegment& s) const { return -2.0 * (1.0 - t) * (s.from - s.branch); }
};

}  // namespace

cplx segment_point(const Segment& s, double t) { return std::visit(SegmentOps{t}, s); }
cplx segment_velocity(const Segment& s, double t) { return std::visit(SegmentVel{t}, s); }

double segment_length(const Segment& s) {
  if (auto* l = std::get_if<LineSegment>(&s)) return std::abs(l->b - l->a);
  if (auto* a = std::get_if<ArcSegment>(&s)) return a->radius * std::abs(a->theta1 - a->theta0);
  auto& b = std::get<BranchEndSegment>(s);
  return std::abs(b.from - b.branch);
}

double segment_distance(const Segment& s, cplx p) {
  if (auto* l = std::get_if<LineSegment>(&s)) return point_segment_distance(l->a, l->b, p);
  if (auto* b = std::get_if<BranchEndSegment>(&s)) {
    if (std::abs(p - b->branch) <= 1e-300) return std::numeric_limits<double>::infinity();
    return point_segment_distance(b->from, b->branch, p);
  }
  const auto& a = std::get<ArcSegment>(s);
  const cplx rel = p - a.center;
  double best = std::min(std::abs(p - segment_point(s, 0.0)), std::abs(p - segment_point(s, 1.0)));
  if (std::abs(a.theta1 - a.theta0) >= 2.0 * kPi) return std::abs(std::abs(rel) - a.radius);
  const double lo = std::min(a.theta0, a.theta1), hi = std::max(a.theta0, a.theta1);
  double ang = std::arg(rel);
  while (ang < lo) ang += 2.0 * kPi;
  while (ang > lo + 2.0 * kPi) ang -= 2.0 * kPi;
  if (ang <= hi) best = std::min(best, std::abs(std::abs(rel) - a.radius));
  return best;
}

XPath::XPath(std::vector<Segment> segments, double clearance)
    : segments_(std::move(segments)), clearance_(clearance) {}

XPath XPath::circle(cplx c, double r, double theta0, double clearance) {
  return XPath({ArcSegment{c, r, theta0, theta0 + 2.0 * kPi}}, clearance);
}

XPath XPath::petal(cplx base, cplx target, double r, double clearance) {
  const cplx u = (base - target) / std::abs(base - target);
  const cplx touch = target + r * u;
  const double th = std::arg(u);
  return XPath({LineSegment{base, touch}, ArcSegment{target, r, th, th + 2.0 * kPi}, LineSegment{touch, base}},
               clearance);
}

cplx XPath::start() const { return segments_.empty() ? cplx{} : segment_point(segments_.front(), 0.0); }
cplx XPath::end() const { return segments_.empty() ? cplx{} : segment_point(segments_.back(), 1.0); }

double XPath::length() const {
  double L = 0.0;
  for (const auto& s : segments_) L += segment_length(s);
  return L;
}

XPath XPath::reversed() const {
  std::vector<Segment> out;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (auto* l = std::get_if<LineSegment>(&*it)) {
      out.push_back(LineSegment{l->b, l->a});
    } else if (auto* a = std::get_if<ArcSegment>(&*it)) {
      out.push_back(ArcSegment{a->center, a->radius, a->theta1, a->theta0});
    } else {
      // Leaving a branch point is not representable; approximate by a line.
      auto& b = std::get<BranchEndSegment>(*it);
      out.push_back(LineSegment{b.branch, b.from});
    }
  }
  return XPath(std::move(out), clearance_);
}

XPath XPath::then(const XPath& other) const {
  auto segs = segments_;
  segs.insert(segs.end(), other.segments_.begin(), other.segments_.end());
  return XPath(std::move(segs), std::min(clearance_, other.clearance_));
}

double XPath::min_distance(std::span<const cplx> pts) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_)
    for (auto p : pts) best = std::min(best, segment_distance(s, p));
  return best;
}

XPath detoured_line(cplx a, cplx b, std::span<const cplx> obstacles, std::span<const double> radius,
                    double clearance, bool major_side) {
  struct Hit {
    double t_in, t_out;
    std::size_t j;
  };
  const cplx d = b - a;
  const double len = std::abs(d);
  std::vector<Hit> hits;
  if (len > 0.0) {
    for (std::size_t j = 0; j < obstacles.size(); ++j) {
      const cplx rel = (obstacles[j] - a) / d;  // coordinates along/perpendicular to the segment
      const double along = std::real(rel) * len;
      const double perp = std::imag(rel) * len;
      const double r = radius[j];
      if (std::abs(perp) >= r) continue;
      const double half = std::sqrt(r * r - perp * perp);
      const double t_in = (along - half) / len, t_out = (along + half) / len;
      if (t_out <= 0.0 || t_in >= 1.0) continue;
      hits.push_back({t_in, t_out, j});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.t_in < y.t_in; });

  std::vector<Segment> segs;
  cplx cur = a;
  for (const Hit& h : hits) {
    // Endpoints inside a detour disc are the caller's responsibility (radius is
    // chosen smaller than the endpoint distance).
    const double t_in = std::max(h.t_in, 0.0), t_out = std::min(h.t_out, 1.0);
    const cplx p_in = a + t_in * d, p_out = a + t_out * d;
    const cplx c = obstacles[h.j];
    if (std::abs(p_in - cur) > 0.0) segs.push_back(LineSegment{cur, p_in});
    const double th0 = std::arg(p_in - c);
    double th1 = std::arg(p_out - c);
    // Shorter arc first; optionally the complementary one.
    double dth = th1 - th0;
    while (dth > kPi) dth -= 2.0 * kPi;
    while (dth < -kPi) dth += 2.0 * kPi;
    if (major_side) dth = dth > 0 ? dth - 2.0 * kPi : dth + 2.0 * kPi;
    segs.push_back(ArcSegment{c, radius[h.j], th0, th0 + dth});
    cur = p_out;
  }
  if (std::abs(b - cur) > 0.0 || segs.empty()) segs.push_back(LineSegment{cur, b});
  return XPath(std::move(segs), clearance);
}

}  // namespace hitchin

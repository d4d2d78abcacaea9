#include "hitchin/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "hitchin/errors.hpp"

namespace hitchin {

namespace {

double seg_dist(cplx a, cplx b, cplx p) { return segment_distance(LineSegment{a, b}, p); }

int match(const std::vector<SurfacePoint>& fiber, cplx y, cplx lam, double& gap) {
  int best = -1;
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  for (std::size_t s = 0; s < fiber.size(); ++s) {
    const double d = std::abs(fiber[s].y - y) + std::abs(fiber[s].lambda - lam);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = static_cast<int>(s);
    } else if (d < d2) {
      d2 = d;
    }
  }
  gap = d2 / std::max(d1, 1e-300);
  return best;
}

int head(const CycleSet& cs, const WalkStep& st) { return st.forward ? cs.orbit_target(st.petal, st.sheet) : st.sheet; }
int tail(const CycleSet& cs, const WalkStep& st) { return st.forward ? st.sheet : cs.orbit_target(st.petal, st.sheet); }

Walk reversed(const Walk& w) {
  Walk r(w.rbegin(), w.rend());
  for (auto& s : r) s.forward = !s.forward;
  return r;
}

bool cancels(const WalkStep& a, const WalkStep& b) {
  return a.petal == b.petal && a.sheet == b.sheet && a.forward != b.forward;
}

Walk cyclic_reduce(Walk w) {
  Walk out;
  for (const auto& s : w) {
    if (!out.empty() && cancels(out.back(), s))
      out.pop_back();
    else
      out.push_back(s);
  }
  std::size_t i = 0, j = out.size();
  while (j - i >= 2 && cancels(out[i], out[j - 1])) {
    ++i;
    --j;
  }
  return Walk(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j));
}

std::vector<int> angular_rank(const CycleSet& cs) {
  const int n = cs.petals();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::arg(cs.targets[a] - cs.base) < std::arg(cs.targets[b] - cs.base); });
  std::vector<int> rank(n);
  for (int r = 0; r < n; ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

XPath petal_path(const CycleSet& cs, int k) {
  return XPath::petal(cs.base, cs.targets[k], cs.radius[k], cs.clearance);
}

IVector walk_coordinates(const CycleSet& cs, const Walk& w) {
  IVector v = IVector::Zero(cs.cycle_dim());
  for (const auto& s : w) {
    const int e = s.petal * cs.orbits + s.sheet;
    if (cs.cycle_of_edge[e] >= 0) v[cs.cycle_of_edge[e]] += s.forward ? 1 : -1;
  }
  return v;
}

IVector edge_chain(const CycleSet& cs, const IVector& coords) {
  IVector chain = IVector::Zero(cs.petals() * cs.orbits);
  for (int j = 0; j < cs.cycle_dim(); ++j) {
    if (coords[j] == 0) continue;
    for (const auto& s : cs.fundamental[j]) chain[s.petal * cs.orbits + s.sheet] += coords[j] * (s.forward ? 1 : -1);
  }
  return chain;
}

std::int64_t intersection(const CycleSet& cs, const Walk& c, const Walk& d) {
  const auto rank = angular_rank(cs);
  const int N = 4 * cs.petals();
  struct Chord {
    int vertex, from, to;
  };
  auto chords = [&](const Walk& w, bool inner) {
    std::vector<Chord> out;
    const std::size_t L = w.size();
    for (std::size_t j = 0; j < L; ++j) {
      const auto& a = w[j];
      const auto& b = w[(j + 1) % L];
      const int v = head(cs, a);
      if (v != tail(cs, b)) throw InconsistentGeometry("walk is not closed");
      // Sides: out 0, out' 1, in' 2, in 3 (counterclockwise at the base point).
      const int arr_side = a.forward ? (inner ? 2 : 3) : (inner ? 1 : 0);
      const int dep_side = b.forward ? (inner ? 1 : 0) : (inner ? 2 : 3);
      out.push_back({v, 4 * rank[a.petal] + arr_side, 4 * rank[b.petal] + dep_side});
    }
    return out;
  };
  const auto cc = chords(c, false), dd = chords(d, true);
  std::int64_t total = 0;
  for (const auto& x : cc)
    for (const auto& y : dd) {
      if (x.vertex != y.vertex) continue;
      const int span = ((x.to - x.from) % N + N) % N;
      auto inside = [&](int k) {
        const int off = ((k - x.from) % N + N) % N;
        return off > 0 && off < span;
      };
      const bool b1 = inside(y.from), b2 = inside(y.to);
      if (b1 && !b2) ++total;
      if (!b1 && b2) --total;
    }
  return total;
}

Walk sheet_walk(const CycleSet& cs, int s, int t) {
  std::vector<int> prev(cs.sheets, -2);
  std::vector<WalkStep> via(cs.sheets);
  std::deque<int> q{s};
  prev[s] = -1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    if (u == t) break;
    for (int k = 0; k < cs.petals(); ++k) {
      const int f = cs.monodromy[k][u];
      if (prev[f] == -2) {
        prev[f] = u;
        via[f] = {k, u, true};
        q.push_back(f);
      }
      const auto it = std::find(cs.monodromy[k].begin(), cs.monodromy[k].end(), u);
      const int b = static_cast<int>(it - cs.monodromy[k].begin());
      if (prev[b] == -2) {
        prev[b] = u;
        via[b] = {k, b, false};
        q.push_back(b);
      }
    }
  }
  if (prev[t] == -2) throw CycleSelectionFailure("sheet graph is disconnected");
  Walk w;
  for (int v = t; v != s; v = prev[v]) w.push_back(via[v]);
  std::reverse(w.begin(), w.end());
  return w;
}

CycleSet build_cycles(const SpectralCurve& curve) {
  curve.validate_generic();
  CycleSet cs;
  cs.family = curve.family();
  cs.h = curve.h();
  std::vector<cplx> targets(curve.base().roots().begin(), curve.base().roots().end());
  for (cplx b : curve.branch_x()) targets.push_back(b);
  std::vector<cplx> obstacles = targets;
  for (cplx s : curve.singular_x()) obstacles.push_back(s);
  cs.targets = targets;
  const int n = static_cast<int>(targets.size());

  // Base point: spokes to every target must stay clear of all other obstacles.
  cplx c0 = 0.0;
  double spread = 0.0;
  for (cplx t : targets) c0 += t;
  c0 /= static_cast<double>(n);
  for (cplx t : obstacles) spread = std::max(spread, std::abs(t - c0));
  double best_score = -1.0;
  for (double f : {1.25, 1.6, 2.2}) {
    for (int j = 0; j < 720; ++j) {
      const cplx b = c0 + (f * spread + 0.5) * std::polar(1.0, 2.0 * kPi * (j + 0.5) / 720.0);
      double score = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k)
        for (std::size_t o = 0; o < obstacles.size(); ++o)
          if (static_cast<int>(o) != k) score = std::min(score, seg_dist(b, targets[k], obstacles[o]));
      if (score > best_score) {
        best_score = score;
        cs.base = b;
      }
    }
  }
  if (!(best_score > 0.0)) throw CycleSelectionFailure("no admissible base point");

  cs.radius.resize(n);
  for (int k = 0; k < n; ++k) {
    double r = std::abs(cs.base - targets[k]);
    for (std::size_t o = 0; o < obstacles.size(); ++o)
      if (static_cast<int>(o) != k) r = std::min(r, std::abs(targets[k] - obstacles[o]));
    for (int j = 0; j < n; ++j)
      if (j != k) r = std::min(r, seg_dist(cs.base, targets[j], targets[k]));
    cs.radius[k] = 0.4 * r;
  }
  double cl = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    cl = std::min(cl, XPath::petal(cs.base, targets[k], cs.radius[k], 0.0).min_distance(obstacles));
  cs.clearance = 0.999 * cl;

  cs.fiber = lift_x(curve, cs.base);
  cs.sheets = static_cast<int>(cs.fiber.size());
  cs.tau.resize(cs.sheets);
  cs.tau1.resize(cs.sheets);
  double gap;
  for (int s = 0; s < cs.sheets; ++s) {
    auto inv = involutions(cs.fiber[s]);
    cs.tau[s] = match(cs.fiber, inv.tau.y, inv.tau.lambda, gap);
    cs.tau1[s] = match(cs.fiber, inv.tau1.y, inv.tau1.lambda, gap);
  }

  cs.monodromy.assign(n, std::vector<int>(cs.sheets));
  for (int k = 0; k < n; ++k) {
    const XPath path = petal_path(cs, k);
    for (int s = 0; s < cs.sheets; ++s) {
      auto end = continue_point(curve, cs.fiber[s], path);
      const int m = match(cs.fiber, end.y, end.lambda, gap);
      if (gap < 100.0) throw InconsistentGeometry("ambiguous sheet after continuation");
      cs.monodromy[k][s] = m;
    }
  }

  // Quotient by tau.
  cs.orbit_of.assign(cs.sheets, -1);
  for (int s = 0; s < cs.sheets; ++s) {
    if (cs.orbit_of[s] >= 0) continue;
    cs.orbit_of[s] = cs.orbit_of[cs.tau[s]] = cs.orbits++;
    cs.orbit_rep.push_back(std::min(s, cs.tau[s]));
  }
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < cs.sheets; ++s)
      if (cs.orbit_of[cs.monodromy[k][s]] != cs.orbit_of[cs.monodromy[k][cs.tau[s]]])
        throw InconsistentGeometry("monodromy does not commute with tau");

  // Spanning tree of the orbit graph.
  const int ne = n * cs.orbits;
  cs.tree_edge.assign(ne, 0);
  std::vector<Walk> to_root(cs.orbits);  // walk root -> v
  std::vector<int> seen(cs.orbits, 0);
  seen[0] = 1;
  std::deque<int> q{0};
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int k = 0; k < n; ++k)
      for (int o = 0; o < cs.orbits; ++o) {
        const int t = cs.orbit_target(k, o);
        const int e = k * cs.orbits + o;
        if (o == u && !seen[t]) {
          seen[t] = 1;
          cs.tree_edge[e] = 1;
          to_root[t] = to_root[u];
          to_root[t].push_back({k, o, true});
          q.push_back(t);
        } else if (t == u && !seen[o]) {
          seen[o] = 1;
          cs.tree_edge[e] = 1;
          to_root[o] = to_root[u];
          to_root[o].push_back({k, o, false});
          q.push_back(o);
        }
      }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw CycleSelectionFailure("quotient sheet graph is disconnected");

  cs.cycle_of_edge.assign(ne, -1);
  for (int k = 0; k < n; ++k)
    for (int o = 0; o < cs.orbits; ++o) {
      const int e = k * cs.orbits + o;
      if (cs.tree_edge[e]) continue;
      Walk w = to_root[o];
      w.push_back({k, o, true});
      const auto back = reversed(to_root[cs.orbit_target(k, o)]);
      w.insert(w.end(), back.begin(), back.end());
      cs.cycle_of_edge[e] = static_cast<int>(cs.fundamental.size());
      cs.fundamental.push_back(cyclic_reduce(w));
    }
  const int m = cs.cycle_dim();

  cs.E.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cs.E(i, j) = i == j ? 0 : intersection(cs, cs.fundamental[i], cs.fundamental[j]);
  if (cs.E != IMatrix(-cs.E.transpose())) throw InconsistentGeometry("intersection form is not skew");

  std::vector<int> tau1_orbit(cs.orbits);
  for (int o = 0; o < cs.orbits; ++o) tau1_orbit[o] = cs.orbit_of[cs.tau1[cs.orbit_rep[o]]];
  cs.T.resize(m, m);
  for (int j = 0; j < m; ++j) {
    Walk img = cs.fundamental[j];
    for (auto& s : img) s.sheet = tau1_orbit[s.sheet];
    cs.T.col(j) = walk_coordinates(cs, img);
  }
  cs.K = cs.E - cs.E * cs.T;
  if (cs.K != IMatrix(-cs.K.transpose())) throw InconsistentGeometry("Prym form is not skew");

  auto red = symplectic_reduce(cs.K);
  if (red.pairs != cs.h)
    throw CycleSelectionFailure("Prym form has " + std::to_string(red.pairs) + " symplectic pairs, expected " +
                                std::to_string(cs.h));
  const std::int64_t d0 = red.divisors.front();
  for (auto d : red.divisors) {
    if (d % d0 != 0) throw CycleSelectionFailure("polarization divisors are not multiples of the first");
    cs.divisors.push_back(d / d0);
  }
  cs.a_cycles = red.basis.topRows(cs.h);
  cs.b_cycles = red.basis.middleRows(cs.h, cs.h);
  return cs;
}

}  // namespace hitchin

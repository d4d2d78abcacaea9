#pragma once

#include <vector>

#include "hitchin/curve.hpp"
#include "hitchin/intlinalg.hpp"

namespace hitchin {

/// A step of a walk in a sheet graph: petal `petal` traversed from `sheet`
/// (forward) or back into `sheet` (backward).
struct WalkStep {
  int petal;
  int sheet;  // departure sheet of the forward traversal
  bool forward;
};
using Walk = std::vector<WalkStep>;

/// Homology data of the quotient curve C = spectral curve / tau, built from
/// loops ("petals") around each branch x-value based at a common point b.
/// Sheets of C over b are tau-orbits of the spectral-curve sheets at b.
struct CycleSet {
  Family family{};
  cplx base;
  std::vector<cplx> targets;   // branch x-values encircled by the petals
  std::vector<double> radius;  // petal radii
  double clearance = 0.0;
  int sheets = 0;                           // spectral-curve sheets over b
  std::vector<SurfacePoint> fiber;          // lift_x at b
  std::vector<std::vector<int>> monodromy;  // [petal][sheet] -> sheet
  std::vector<int> tau, tau1;               // sheet permutations at b

  int orbits = 0;               // sheets of C over b
  std::vector<int> orbit_of;    // sheet -> orbit
  std::vector<int> orbit_rep;   // orbit -> representative sheet
  std::vector<Walk> fundamental;  // closed walks in the orbit graph (sheet = orbit index)
  std::vector<int> tree_edge;     // per orbit edge (petal * orbits + orbit): 1 if in spanning tree
  std::vector<int> cycle_of_edge; // non-tree orbit edge -> fundamental cycle index, else -1

  IMatrix E;  // intersections of fundamental cycles
  IMatrix T;  // tau1 action on cycle coordinates (columns are images)
  IMatrix K;  // E - E T
  int h = 0;
  IMatrix a_cycles, b_cycles;         // h x m coordinates
  std::vector<std::int64_t> divisors; // polarization type, normalized to start at 1

  int petals() const { return static_cast<int>(targets.size()); }
  int cycle_dim() const { return static_cast<int>(fundamental.size()); }
  int orbit_target(int petal, int orbit) const { return orbit_of[monodromy[petal][orbit_rep[orbit]]]; }
};

/// Closed petal loop from the base point around targets[k].
XPath petal_path(const CycleSet& cs, int k);

/// Builds petals, monodromy, intersection form and a symplectic basis.
CycleSet build_cycles(const SpectralCurve& curve);

/// Orbit-edge multiplicities (petal * orbits + orbit) of a cycle given in
/// fundamental coordinates.
IVector edge_chain(const CycleSet& cs, const IVector& coords);

/// Fundamental coordinates of a closed walk in the orbit graph.
IVector walk_coordinates(const CycleSet& cs, const Walk& w);

/// Chord-model intersection number of two closed walks in the orbit graph.
std::int64_t intersection(const CycleSet& cs, const Walk& c, const Walk& d);

/// Shortest walk in the spectral-curve sheet graph from sheet s to sheet t.
Walk sheet_walk(const CycleSet& cs, int s, int t);

}  // namespace hitchin

#pragma once

#include <array>
#include <vector>

#include "cardiotwin/geometry.hpp"

namespace cardiotwin {

struct RootEntry {
  int node = -1;
  double delay_ms = 0.0;  // pacing offset before normalization
};

struct RootNodes {
  std::vector<RootEntry> entries;
};

// Node activation times in ms. Unreachable nodes hold +infinity.
struct ActivationMap {
  std::vector<double> t_ms;

  double max_finite() const;
  int unreachable_count() const;
};

struct EikonalOptions {
  double tol_ms = 1e-3;  // fixed-point convergence threshold
};

// Anisotropic eikonal solve over the tet mesh: the front travels along a
// straight chord e of element k in time sqrt(e' G_k e), where G_k is the
// inverse of the squared-velocity tensor spanned by the element frame and the
// per-element (fiber, sheet, sheet-normal) speeds in cm/s. Roots seed the
// front at their delays shifted so the earliest root starts at 0; a delayed
// root is overtaken when the front arrives before it fires, so the solution
// is the minimum over roots of shifted delay plus travel time. Active-list
// fixed-point iteration with per-node face updates; the update of a node
// falls back to edge and vertex relaxations whenever the in-face minimizer is
// infeasible, which also covers obtuse and degenerate elements.
ActivationMap solve_activation(const Mesh& mesh,
                               const std::vector<std::array<double, 3>>& elem_speeds_cms,
                               const RootNodes& roots, const EikonalOptions& opts = {});

// Reference solver: Dijkstra shortest arrival over the graph of chords
// between barycentric lattice points of every element (refine >= 1 splits
// each edge into `refine` segments; refine >= 2 adds face and interior
// points). Converges to the eikonal solution from above as refine grows.
ActivationMap oracle_activation(const Mesh& mesh,
                                const std::vector<std::array<double, 3>>& elem_speeds_cms,
                                const RootNodes& roots, int refine);

struct RootTarget {
  CobivecoCoord coord;
  double delay_ms = 0.0;
};

// Seven standardized pacing sites: LV mid-septum, LV basal-anterior
// paraseptal, two LV mid-posterior, RV mid-septum, two RV free-wall.
std::vector<RootTarget> default_root_targets();

// Snaps each target to the nearest endocardium-tagged node (periodic rt,
// chamber-weighted); ties resolve to the lowest node index.
RootNodes place_roots(const Mesh& mesh, const std::vector<RootTarget>& targets);

RootNodes default_roots(const Mesh& mesh);

}  // namespace cardiotwin

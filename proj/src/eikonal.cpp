#include "cardiotwin/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cardiotwin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCmPerSecToMmPerMs = 0.01;

// Symmetric 3x3 tensor, row-major upper triangle.
struct Sym3 {
  double xx, xy, xz, yy, yz, zz;
};

// G = F diag(1/vf^2, 1/vs^2, 1/vn^2) F' so that chord traversal time is
// sqrt(e' G e) for a segment e in mm and speeds in mm/ms.
Sym3 inverse_speed_tensor(const Frame& fr, const std::array<double, 3>& v_cms) {
  const Vec3 axes[3] = {fr.fiber, fr.sheet, fr.normal};
  Sym3 g{0, 0, 0, 0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    const double v = v_cms[k] * kCmPerSecToMmPerMs;
    const double w = 1.0 / (v * v);
    const Vec3& a = axes[k];
    g.xx += w * a.x * a.x;
    g.xy += w * a.x * a.y;
    g.xz += w * a.x * a.z;
    g.yy += w * a.y * a.y;
    g.yz += w * a.y * a.z;
    g.zz += w * a.z * a.z;
  }
  return g;
}

double quad(const Sym3& g, const Vec3& a, const Vec3& b) {
  return a.x * (g.xx * b.x + g.xy * b.y + g.xz * b.z) +
         a.y * (g.xy * b.x + g.yy * b.y + g.yz * b.z) +
         a.z * (g.xz * b.x + g.yz * b.y + g.zz * b.z);
}

// Minimal arrival at x4 through the segment [xa, xb] carrying times
// (ta, tb): min over s of  ta + s (tb - ta) + sqrt(e(s)' G e(s)),
// e(s) = (x4 - xa) - s (xb - xa). Endpoints included.
double edge_update(double ta, double tb, const Vec3& ea, const Vec3& eab, const Sym3& g) {
  const double c0 = quad(g, ea, ea);
  const double c1 = quad(g, ea, eab);
  const double c2 = quad(g, eab, eab);
  double best = kInf;
  if (ta < kInf) best = std::min(best, ta + std::sqrt(std::max(0.0, c0)));
  if (tb < kInf) best = std::min(best, tb + std::sqrt(std::max(0.0, c0 - 2.0 * c1 + c2)));
  if (ta == kInf || tb == kInf || c2 <= 0.0) return best;

  const double dt = tb - ta;
  const double denom = c2 - dt * dt;
  if (denom <= 0.0) return best;  // front faster than the chord allows: endpoint wins
  const double s2 = (c2 * c0 - c1 * c1) / denom;
  if (s2 <= 0.0) return best;
  const double S = std::sqrt(s2);
  const double s = (c1 - S * dt) / c2;  // stationary point of the 1-D problem
  if (s <= 0.0 || s >= 1.0) return best;
  const Vec3 e = ea - eab * s;
  return std::min(best, ta + s * dt + std::sqrt(std::max(0.0, quad(g, e, e))));
}

// Arrival at x4 through the face (x1, x2, x3) with times (t1, t2, t3):
// interior stationary point when feasible, otherwise the three edges.
double face_update(const Vec3& x1, const Vec3& x2, const Vec3& x3, const Vec3& x4, double t1,
                   double t2, double t3, const Sym3& g) {
  double best = std::min({edge_update(t1, t3, x4 - x1, x3 - x1, g),
                          edge_update(t2, t3, x4 - x2, x3 - x2, g),
                          edge_update(t1, t2, x4 - x1, x2 - x1, g)});
  if (t1 == kInf || t2 == kInf || t3 == kInf) return best;

  const Vec3 e3 = x4 - x3, u1 = x1 - x3, u2 = x2 - x3;
  const double a0 = quad(g, e3, e3);
  const double w1 = quad(g, e3, u1), w2 = quad(g, e3, u2);
  const double q11 = quad(g, u1, u1), q12 = quad(g, u1, u2), q22 = quad(g, u2, u2);
  const double det = q11 * q22 - q12 * q12;
  if (det <= 0.0) return best;
  const double i11 = q22 / det, i12 = -q12 / det, i22 = q11 / det;
  const double d1 = t1 - t3, d2 = t2 - t3;

  // S^2 (1 - d' Q^-1 d) = a0 - w' Q^-1 w, then l = Q^-1 (w - S d).
  const double dQd = d1 * (i11 * d1 + i12 * d2) + d2 * (i12 * d1 + i22 * d2);
  const double wQw = w1 * (i11 * w1 + i12 * w2) + w2 * (i12 * w1 + i22 * w2);
  const double denom = 1.0 - dQd;
  const double num = a0 - wQw;
  if (denom <= 0.0 || num <= 0.0) return best;
  const double S = std::sqrt(num / denom);
  const double r1 = w1 - S * d1, r2 = w2 - S * d2;
  const double l1 = i11 * r1 + i12 * r2;
  const double l2 = i12 * r1 + i22 * r2;
  constexpr double eps = 1e-12;
  if (l1 < eps || l2 < eps || l1 + l2 > 1.0 - eps) return best;
  return std::min(best, t3 + l1 * d1 + l2 * d2 + S);
}

}  // namespace

double ActivationMap::max_finite() const {
  double m = 0.0;
  for (double v : t_ms)
    if (v < kInf) m = std::max(m, v);
  return m;
}

int ActivationMap::unreachable_count() const {
  return static_cast<int>(std::count(t_ms.begin(), t_ms.end(), kInf));
}

ActivationMap solve_activation(const Mesh& mesh,
                               const std::vector<std::array<double, 3>>& elem_speeds_cms,
                               const RootNodes& roots, const EikonalOptions& opts) {
  const int nn = mesh.node_count();
  const int ne = mesh.elem_count();
  if (static_cast<int>(elem_speeds_cms.size()) != ne)
    throw ValidationError("solve_activation: speed field does not match element count");
  for (const auto& v : elem_speeds_cms)
    if (!(v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0))
      throw ValidationError("solve_activation: non-positive conduction speed");
  if (roots.entries.empty()) throw ValidationError("solve_activation: no root nodes");
  for (const auto& r : roots.entries)
    if (r.node < 0 || r.node >= nn)
      throw ValidationError("solve_activation: root node index out of range");

  std::vector<Sym3> tensors(ne);
  for (int e = 0; e < ne; ++e) tensors[e] = inverse_speed_tensor(mesh.frames[e], elem_speeds_cms[e]);

  const MeshAdjacency adj = build_adjacency(mesh);

  const double tol = opts.tol_ms;
  std::vector<double> t(nn);

  // Single-source active-list fixed point into t. A node leaves the list
  // once its own update stops moving it by more than tol, at which point the
  // neighbors it can still improve are activated. Re-activation triggers on
  // any improvement beyond fp noise, not on tol: gating it by tol lets
  // per-node slack accumulate along dependency chains far past tol in total.
  auto solve_single = [&](int seed, double t0) {
    constexpr double kImproveEps = 1e-9;
    t.assign(nn, kInf);
    t[seed] = t0;

    auto relax = [&](int v) {
      double best = kInf;
      for (int k = adj.elem_offset[v]; k < adj.elem_offset[v + 1]; ++k) {
        const int e = adj.elem_list[k];
        const auto& tet = mesh.tets[e];
        int f[3], m = 0;
        for (int i = 0; i < 4; ++i)
          if (tet[i] != v) f[m++] = tet[i];
        best = std::min(best, face_update(mesh.nodes[f[0]], mesh.nodes[f[1]], mesh.nodes[f[2]],
                                          mesh.nodes[v], t[f[0]], t[f[1]], t[f[2]], tensors[e]));
      }
      return best;
    };

    std::vector<int> active, next;
    std::vector<char> in_active(nn, 0);
    for (int k = adj.node_offset[seed]; k < adj.node_offset[seed + 1]; ++k) {
      const int w = adj.node_list[k];
      if (!in_active[w]) {
        in_active[w] = 1;
        active.push_back(w);
      }
    }

    while (!active.empty()) {
      next.clear();
      for (const int v : active) {
        const double old = t[v];
        const double q = relax(v);
        if (q < t[v]) t[v] = q;
        if (old - q > tol) {
          next.push_back(v);  // still moving, stay active
          continue;
        }
        in_active[v] = 0;
        for (int k = adj.node_offset[v]; k < adj.node_offset[v + 1]; ++k) {
          const int w = adj.node_list[k];
          if (in_active[w]) continue;
          const double qw = relax(w);
          if (qw < t[w] - kImproveEps) {
            t[w] = qw;
            in_active[w] = 1;
            next.push_back(w);
          }
        }
      }
      active.swap(next);
    }
  };

  double min_delay = kInf;
  for (const auto& r : roots.entries) min_delay = std::min(min_delay, r.delay_ms);

  // One front per root, combined by pointwise minimum: t(x) is the min over
  // roots of shifted delay plus travel time, so a delayed site is overtaken
  // when an earlier front arrives first. Solving all roots in one pass would
  // be cheaper but lets face updates mix arrival values from colliding
  // fronts, inventing shortcuts that break that identity.
  std::vector<std::pair<int, double>> seeds;
  for (const auto& r : roots.entries) {
    const double t0 = r.delay_ms - min_delay;
    bool merged = false;
    for (auto& s : seeds)
      if (s.first == r.node) {
        s.second = std::min(s.second, t0);
        merged = true;
        break;
      }
    if (!merged) seeds.emplace_back(r.node, t0);
  }

  ActivationMap atm;
  atm.t_ms.assign(nn, kInf);
  for (const auto& [seed, t0] : seeds) {
    solve_single(seed, t0);
    for (int i = 0; i < nn; ++i) atm.t_ms[i] = std::min(atm.t_ms[i], t[i]);
  }
  return atm;
}

std::vector<RootTarget> default_root_targets() {
  // Endocardial sites; rotational convention: septum center 5/6, posterior
  // junction 0, anterior wall 7/12, lateral 1/3.
  return {
      {{0.0, 0.50, 5.0 / 6.0, 0}, 0.0},  // LV mid-septum
      {{0.0, 0.80, 0.60, 0}, 0.0},       // LV basal-anterior paraseptal
      {{0.0, 0.50, 0.05, 0}, 0.0},       // LV mid-posterior
      {{0.0, 0.50, 0.95, 0}, 0.0},       // LV mid-posterior, septal side
      {{0.0, 0.50, 5.0 / 6.0, 1}, 0.0},  // RV mid-septum
      {{0.0, 0.50, 0.25, 1}, 0.0},       // RV free wall
      {{0.0, 0.60, 0.45, 1}, 0.0},       // RV free wall
  };
}

RootNodes place_roots(const Mesh& mesh, const std::vector<RootTarget>& targets) {
  if (targets.empty()) throw ValidationError("place_roots: no targets");
  std::vector<int> endo;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.surface_tags[i] == SurfaceTag::lv_endo || mesh.surface_tags[i] == SurfaceTag::rv_endo)
      endo.push_back(i);
  if (endo.empty()) throw ValidationError("place_roots: mesh has no endocardium-tagged nodes");

  RootNodes roots;
  for (const auto& tgt : targets) {
    cardiotwin::validate(tgt.coord);
    int best = -1;
    double best_d = kInf;
    for (int i : endo) {
      const double d = coord_distance2(mesh.cobiveco[i], tgt.coord);
      if (d < best_d) {  // strict: ties keep the lowest index
        best_d = d;
        best = i;
      }
    }
    roots.entries.push_back({best, tgt.delay_ms});
  }
  return roots;
}

RootNodes default_roots(const Mesh& mesh) { return place_roots(mesh, default_root_targets()); }

}  // namespace cardiotwin

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "cardiotwin/eikonal.hpp"

namespace cardiotwin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCmPerSecToMmPerMs = 0.01;

struct Sym3 {
  double xx, xy, xz, yy, yz, zz;
};

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

double chord_time(const Sym3& g, const Vec3& e) {
  const double q = e.x * (g.xx * e.x + g.xy * e.y + g.xz * e.z) +
                   e.y * (g.xy * e.x + g.yy * e.y + g.yz * e.z) +
                   e.z * (g.xz * e.x + g.yz * e.y + g.zz * e.z);
  return std::sqrt(std::max(0.0, q));
}

// A barycentric lattice point of one element, identified across elements by
// the (mesh node, integer weight) pairs with nonzero weight. Points on shared
// faces and edges therefore deduplicate exactly.
using PointKey = std::array<std::pair<int, int>, 4>;  // padded with (-1,0)

PointKey make_key(const std::array<int, 4>& tet, const std::array<int, 4>& w) {
  PointKey k;
  int m = 0;
  for (int i = 0; i < 4; ++i)
    if (w[i] > 0) k[m++] = {tet[i], w[i]};
  std::sort(k.begin(), k.begin() + m);
  for (; m < 4; ++m) k[m] = {-1, 0};
  return k;
}

}  // namespace

ActivationMap oracle_activation(const Mesh& mesh,
                                const std::vector<std::array<double, 3>>& elem_speeds_cms,
                                const RootNodes& roots, int refine) {
  if (refine < 1) throw ValidationError("oracle_activation: refine must be >= 1");
  const int nn = mesh.node_count();
  const int ne = mesh.elem_count();
  if (static_cast<int>(elem_speeds_cms.size()) != ne)
    throw ValidationError("oracle_activation: speed field does not match element count");
  for (const auto& v : elem_speeds_cms)
    if (!(v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0))
      throw ValidationError("oracle_activation: non-positive conduction speed");
  if (roots.entries.empty()) throw ValidationError("oracle_activation: no root nodes");

  // Barycentric weight tuples with sum == refine.
  std::vector<std::array<int, 4>> weights;
  for (int i = 0; i <= refine; ++i)
    for (int j = 0; i + j <= refine; ++j)
      for (int k = 0; i + j + k <= refine; ++k)
        weights.push_back({i, j, k, refine - i - j - k});

  std::map<PointKey, int> ids;
  std::vector<Vec3> pts;
  std::vector<int> mesh_node_of;  // graph id of each original node
  mesh_node_of.assign(nn, -1);

  struct Arc {
    int to;
    double w;
  };
  std::vector<std::vector<Arc>> graph;

  auto intern = [&](const std::array<int, 4>& tet, const std::array<int, 4>& w) {
    const PointKey key = make_key(tet, w);
    auto [it, inserted] = ids.try_emplace(key, static_cast<int>(pts.size()));
    if (inserted) {
      Vec3 p{0, 0, 0};
      for (int i = 0; i < 4; ++i) p += mesh.nodes[tet[i]] * (static_cast<double>(w[i]) / refine);
      pts.push_back(p);
      graph.emplace_back();
      if (key[0].second == refine) mesh_node_of[key[0].first] = it->second;
    }
    return it->second;
  };

  std::vector<int> local(weights.size());
  for (int e = 0; e < ne; ++e) {
    const Sym3 g = inverse_speed_tensor(mesh.frames[e], elem_speeds_cms[e]);
    for (std::size_t a = 0; a < weights.size(); ++a) local[a] = intern(mesh.tets[e], weights[a]);
    for (std::size_t a = 0; a < weights.size(); ++a)
      for (std::size_t b = a + 1; b < weights.size(); ++b) {
        const double w = chord_time(g, pts[local[a]] - pts[local[b]]);
        graph[local[a]].push_back({local[b], w});
        graph[local[b]].push_back({local[a], w});
      }
  }

  std::vector<double> dist(pts.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  double min_delay = kInf;
  for (const auto& r : roots.entries) min_delay = std::min(min_delay, r.delay_ms);
  for (const auto& r : roots.entries) {
    if (r.node < 0 || r.node >= nn)
      throw ValidationError("oracle_activation: root node index out of range");
    const int gid = mesh_node_of[r.node];
    const double bc = r.delay_ms - min_delay;
    if (bc < dist[gid]) {
      dist[gid] = bc;
      heap.push({bc, gid});
    }
  }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const Arc& a : graph[v]) {
      const double nd = d + a.w;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        heap.push({nd, a.to});
      }
    }
  }

  ActivationMap atm;
  atm.t_ms.assign(nn, kInf);
  for (int i = 0; i < nn; ++i)
    if (mesh_node_of[i] >= 0) atm.t_ms[i] = dist[mesh_node_of[i]];
  return atm;
}

}  // namespace cardiotwin

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "cardiotwin/geometry.hpp"

namespace cardiotwin {

namespace {

// Kuhn decomposition of the unit cube into six tets sharing the main
// diagonal. Corner ids encode (dx, dy, dz) as dx + 2*dy + 4*dz. The split is
// translation invariant, so faces of adjacent cubes always match.
constexpr int kCubeTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
    {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

struct EllipsoidShell {
  Vec3 center;
  Vec3 inner, outer;  // semi-axes, componentwise inner < outer
};

double level(const Vec3& p, const Vec3& c, const Vec3& semi) {
  const double x = (p.x - c.x) / semi.x;
  const double y = (p.y - c.y) / semi.y;
  const double z = (p.z - c.z) / semi.z;
  return x * x + y * y + z * z;
}

Vec3 level_gradient(const Vec3& p, const Vec3& c, const Vec3& semi) {
  return {2.0 * (p.x - c.x) / (semi.x * semi.x), 2.0 * (p.y - c.y) / (semi.y * semi.y),
          2.0 * (p.z - c.z) / (semi.z * semi.z)};
}

// Wall-depth parameter: the s in [0,1] for which p lies on the ellipsoid with
// semi-axes lerp(inner, outer, s). Clamped outside the shell. The level value
// is strictly decreasing in s, so bisection is safe.
double shell_param(const Vec3& p, const EllipsoidShell& sh) {
  auto lv = [&](double s) {
    const Vec3 semi{lerp(sh.inner.x, sh.outer.x, s), lerp(sh.inner.y, sh.outer.y, s),
                    lerp(sh.inner.z, sh.outer.z, s)};
    return level(p, sh.center, semi);
  };
  if (lv(0.0) <= 1.0) return 0.0;
  if (lv(1.0) >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lv(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// First-order distance from p to the level-1 surface of an ellipsoid,
// measured along the ray from its center.
double approx_surface_distance(const Vec3& p, const Vec3& c, const Vec3& semi) {
  const double L = level(p, c, semi);
  const double r = norm(p - c);
  if (L <= 0.0) return r > 0.0 ? r : semi.x;
  const double s = std::sqrt(L);
  return std::abs(r * (1.0 - 1.0 / s));
}

// Newton projection of p onto the level-1 surface along the level gradient.
Vec3 project_to_surface(Vec3 p, const Vec3& c, const Vec3& semi) {
  for (int it = 0; it < 40; ++it) {
    const double f = level(p, c, semi) - 1.0;
    if (std::abs(f) < 1e-14) break;
    const Vec3 g = level_gradient(p, c, semi);
    const double gg = dot(g, g);
    if (gg < 1e-30) break;
    p = p - g * (f / gg);
  }
  return p;
}

struct PhantomDomain {
  EllipsoidShell lv, rv;
  double base_z;

  bool in_lv_outer(const Vec3& p) const { return level(p, lv.center, lv.outer) <= 1.0; }

  bool in_tissue(const Vec3& p) const {
    if (p.z > base_z) return false;
    if (in_lv_outer(p)) return level(p, lv.center, lv.inner) > 1.0;
    return level(p, rv.center, rv.outer) <= 1.0 && level(p, rv.center, rv.inner) > 1.0;
  }
};

PhantomDomain make_domain(const PhantomSpec& spec) {
  PhantomDomain d;
  d.lv = {{0.0, 0.0, 0.0}, spec.lv_inner, spec.lv_outer};
  // The RV pair is shifted along +x far enough that its shell wraps onto the
  // septal side of the LV but its cavity stays clear of the LV free wall.
  d.rv = {{0.88 * spec.lv_outer.x, 0.0, 0.0}, spec.rv_inner, spec.rv_outer};
  d.base_z = spec.base_height;
  return d;
}

double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Symmetric jitter in [-1, 1).
  double sym() { return 2.0 * unit_from_bits(next()) - 1.0; }
};

struct FaceKey {
  std::array<int, 3> v;
  bool operator==(const FaceKey& o) const { return v == o.v; }
};
struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : k.v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
  }
};

std::vector<char> boundary_nodes(const std::vector<std::array<int, 4>>& tets, int node_count) {
  std::unordered_map<FaceKey, int, FaceKeyHash> count;
  count.reserve(tets.size() * 4);
  constexpr int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& t : tets)
    for (const auto& f : faces) {
      FaceKey k{{t[f[0]], t[f[1]], t[f[2]]}};
      std::sort(k.v.begin(), k.v.end());
      ++count[k];
    }
  std::vector<char> on_boundary(node_count, 0);
  for (const auto& [k, c] : count)
    if (c == 1)
      for (int v : k.v) on_boundary[v] = 1;
  return on_boundary;
}

// Largest connected component over the node graph induced by the tets.
// Returns the kept tets with nodes compacted in ascending old-index order.
void keep_largest_component(std::vector<std::array<int, 4>>& tets, std::vector<Vec3>& pos) {
  const int nn = static_cast<int>(pos.size());
  std::vector<int> parent(nn);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(nn, 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  };
  for (const auto& t : tets) {
    unite(t[0], t[1]);
    unite(t[0], t[2]);
    unite(t[0], t[3]);
  }
  std::vector<int> size(nn, 0);
  for (const auto& t : tets) ++size[find(t[0])];
  int best = -1;
  for (int i = 0; i < nn; ++i)
    if (best < 0 || size[find(i)] > size[best]) best = find(i);

  std::vector<int> remap(nn, -1);
  std::vector<Vec3> new_pos;
  std::vector<std::array<int, 4>> new_tets;
  new_tets.reserve(tets.size());
  for (const auto& t : tets) {
    if (find(t[0]) != best) continue;
    std::array<int, 4> nt{};
    for (int i = 0; i < 4; ++i) {
      if (remap[t[i]] < 0) {
        remap[t[i]] = static_cast<int>(new_pos.size());
        new_pos.push_back(pos[t[i]]);
      }
      nt[i] = remap[t[i]];
    }
    new_tets.push_back(nt);
  }
  pos = std::move(new_pos);
  tets = std::move(new_tets);
}

}  // namespace

void PhantomSpec::validate() const {
  auto positive = [](const Vec3& v) { return v.x > 0.0 && v.y > 0.0 && v.z > 0.0; };
  if (!positive(lv_outer) || !positive(lv_inner) || !positive(rv_outer) || !positive(rv_inner))
    throw ValidationError("phantom: semi-axes must be positive");
  const Vec3 lv_wall = lv_outer - lv_inner;
  const Vec3 rv_wall = rv_outer - rv_inner;
  if (!positive(lv_wall) || !positive(rv_wall))
    throw ValidationError("phantom: degenerate geometry, wall thickness must be positive");
  if (edge_length <= 0.0) throw ValidationError("phantom: edge length must be positive");
  const double min_wall = std::min({lv_wall.x, lv_wall.y, lv_wall.z});
  if (edge_length > min_wall)
    throw ValidationError("phantom: resolution too coarse, edge length " +
                          std::to_string(edge_length) + " mm exceeds the minimal wall thickness " +
                          std::to_string(min_wall) + " mm");
  if (base_height <= -lv_outer.z || base_height > lv_outer.z)
    throw ValidationError("phantom: base truncation plane does not cut the LV");
}

Mesh build_phantom(const PhantomSpec& spec, std::uint64_t seed) {
  spec.validate();
  const PhantomDomain dom = make_domain(spec);
  const double h = spec.edge_length;

  // Lattice bounds; grid anchored at lo independent of h.
  const Vec3 lo{std::min(-spec.lv_outer.x, dom.rv.center.x - spec.rv_outer.x) - 0.5 * h,
                -std::max(spec.lv_outer.y, spec.rv_outer.y) - 0.5 * h, -spec.lv_outer.z - 0.5 * h};
  const Vec3 hi{std::max(spec.lv_outer.x, dom.rv.center.x + spec.rv_outer.x) + 0.5 * h,
                std::max(spec.lv_outer.y, spec.rv_outer.y) + 0.5 * h, spec.base_height + 0.5 * h};
  const int nx = static_cast<int>(std::ceil((hi.x - lo.x) / h));
  const int ny = static_cast<int>(std::ceil((hi.y - lo.y) / h));
  const int nz = static_cast<int>(std::ceil((hi.z - lo.z) / h));

  auto vertex_pos = [&](int ix, int iy, int iz) {
    return Vec3{lo.x + ix * h, lo.y + iy * h, lo.z + iz * h};
  };
  auto vertex_id = [&](int ix, int iy, int iz) {
    return (iz * (ny + 1) + iy) * (nx + 1) + ix;
  };

  // Collect tets whose centroid lies in tissue.
  std::vector<int> node_map(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1), -1);
  std::vector<Vec3> pos;
  std::vector<std::array<int, 4>> tets;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::array<int, 8> corner_id;
        std::array<Vec3, 8> corner_pos;
        for (int c = 0; c < 8; ++c) {
          const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
          corner_id[c] = vertex_id(ix + dx, iy + dy, iz + dz);
          corner_pos[c] = vertex_pos(ix + dx, iy + dy, iz + dz);
        }
        for (const auto& kt : kCubeTets) {
          const Vec3 centroid =
              (corner_pos[kt[0]] + corner_pos[kt[1]] + corner_pos[kt[2]] + corner_pos[kt[3]]) *
              0.25;
          if (!dom.in_tissue(centroid)) continue;
          std::array<int, 4> t{};
          for (int i = 0; i < 4; ++i) {
            const int lid = corner_id[kt[i]];
            if (node_map[lid] < 0) {
              node_map[lid] = static_cast<int>(pos.size());
              pos.push_back(corner_pos[kt[i]]);
            }
            t[i] = node_map[lid];
          }
          if (tet_volume(pos[t[0]], pos[t[1]], pos[t[2]], pos[t[3]]) < 0.0)
            std::swap(t[2], t[3]);
          tets.push_back(t);
        }
      }
  if (tets.empty()) throw ValidationError("phantom: empty tissue domain");

  keep_largest_component(tets, pos);
  const int nn = static_cast<int>(pos.size());
  const std::vector<Vec3> lattice_pos = pos;
  const std::vector<char> on_boundary = boundary_nodes(tets, nn);

  // Interior jitter breaks the lattice alignment so anisotropy is exercised
  // on generic element shapes. Boundary nodes are snapped instead.
  SplitMix64 rng{seed * 0x9e3779b97f4a7c15ULL + 0x2545F4914F6CDD1DULL};
  for (int i = 0; i < nn; ++i) {
    const double jx = rng.sym(), jy = rng.sym(), jz = rng.sym();
    if (on_boundary[i]) continue;
    pos[i] = pos[i] + Vec3{jx, jy, jz} * (0.12 * h);
  }

  // Snap boundary nodes to the nearest analytic surface and tag them.
  std::vector<SurfaceTag> tags(nn, SurfaceTag::none);
  std::vector<char> moved(nn, 0);
  for (int i = 0; i < nn; ++i) {
    if (!on_boundary[i]) continue;
    const Vec3 p = pos[i];
    struct Cand {
      double dist;
      int which;  // 0 lv_in, 1 lv_out, 2 rv_in, 3 rv_out, 4 base plane
    };
    std::array<Cand, 5> cand{{
        {approx_surface_distance(p, dom.lv.center, dom.lv.inner), 0},
        {approx_surface_distance(p, dom.lv.center, dom.lv.outer), 1},
        {approx_surface_distance(p, dom.rv.center, dom.rv.inner), 2},
        {approx_surface_distance(p, dom.rv.center, dom.rv.outer), 3},
        {std::abs(p.z - dom.base_z), 4},
    }};
    const Cand best = *std::min_element(cand.begin(), cand.end(),
                                        [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
    if (best.dist > h) continue;  // boundary only through the staircase, leave in place
    Vec3 q = p;
    SurfaceTag tag = SurfaceTag::none;
    switch (best.which) {
      case 0: q = project_to_surface(p, dom.lv.center, dom.lv.inner); tag = SurfaceTag::lv_endo; break;
      case 1: q = project_to_surface(p, dom.lv.center, dom.lv.outer); tag = SurfaceTag::epi; break;
      case 2: q = project_to_surface(p, dom.rv.center, dom.rv.inner); tag = SurfaceTag::rv_endo; break;
      case 3: q = project_to_surface(p, dom.rv.center, dom.rv.outer); tag = SurfaceTag::epi; break;
      case 4: q.z = dom.base_z; break;
    }
    if (q.z > dom.base_z) {  // surface point above the cut belongs to the base rim
      q.z = dom.base_z;
      tag = SurfaceTag::none;
    }
    pos[i] = q;
    tags[i] = tag;
    moved[i] = 1;
  }

  // Tag consistency: an endocardial tag must sit on its own chamber's inner
  // surface, an epicardial tag on an outer one. Junction nodes fail this and
  // stay untagged (the snap itself is kept).
  auto node_in_lv_side = [&](const Vec3& p) { return level(p, dom.lv.center, dom.lv.outer) <= 1.0 + 1e-9; };
  for (int i = 0; i < nn; ++i) {
    if (tags[i] == SurfaceTag::none) continue;
    const bool lv_side = node_in_lv_side(pos[i]);
    const EllipsoidShell& sh = lv_side ? dom.lv : dom.rv;
    const double s = shell_param(pos[i], sh);
    bool ok = false;
    switch (tags[i]) {
      case SurfaceTag::lv_endo: ok = lv_side && s < 1e-6; break;
      case SurfaceTag::rv_endo: ok = !lv_side && s < 1e-6; break;
      case SurfaceTag::epi: ok = s > 1.0 - 1e-6; break;
      default: break;
    }
    if (!ok) tags[i] = SurfaceTag::none;
  }

  // Undo any displacement that inverted or flattened an element.
  const double vol_floor = 1e-6 * h * h * h;
  for (int pass = 0; pass < 64; ++pass) {
    bool any_bad = false;
    for (const auto& t : tets) {
      if (tet_volume(pos[t[0]], pos[t[1]], pos[t[2]], pos[t[3]]) > vol_floor) continue;
      any_bad = true;
      for (int v : t) {
        if (pos[v] == lattice_pos[v]) continue;
        pos[v] = lattice_pos[v];
        if (moved[v]) tags[v] = SurfaceTag::none;  // no longer exactly on a surface
        moved[v] = 0;
      }
    }
    if (!any_bad) break;
  }

  // Per-node coordinates.
  Mesh mesh;
  mesh.nodes = std::move(pos);
  mesh.tets = std::move(tets);
  mesh.surface_tags = std::move(tags);
  mesh.cobiveco.resize(nn);
  const double z_apex = -spec.lv_outer.z;
  for (int i = 0; i < nn; ++i) {
    const Vec3& p = mesh.nodes[i];
    CobivecoCoord c;
    const bool lv_side = node_in_lv_side(p);
    c.tv = lv_side ? 0 : 1;
    switch (mesh.surface_tags[i]) {
      case SurfaceTag::lv_endo:
      case SurfaceTag::rv_endo: c.tm = 0.0; break;
      case SurfaceTag::epi: c.tm = 1.0; break;
      default: c.tm = shell_param(p, lv_side ? dom.lv : dom.rv); break;
    }
    c.ab = clamp01((p.z - z_apex) / (spec.base_height - z_apex));
    if (lv_side) {
      const double theta = std::atan2(p.y, p.x);  // septum faces +x
      c.rt = fract(5.0 / 6.0 - theta / (2.0 * kPi));
    } else {
      const double phi = std::atan2(p.y, p.x - dom.rv.center.x);  // septum toward -x
      c.rt = fract(1.0 / 3.0 + phi / (2.0 * kPi));
    }
    mesh.cobiveco[i] = c;
  }

  // Rule-based material frames, helix angle linear in wall depth.
  mesh.frames.resize(mesh.tets.size());
  const Vec3 zhat{0.0, 0.0, 1.0};
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const Vec3 c =
        (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]] + mesh.nodes[t[3]]) * 0.25;
    const bool lv_side = node_in_lv_side(c);
    const EllipsoidShell& sh = lv_side ? dom.lv : dom.rv;
    const double tm = shell_param(c, sh);

    Vec3 et = level_gradient(c, sh.center, sh.outer);  // outward transmural
    double n = norm(et);
    if (n < 1e-12) et = Vec3{1.0, 0.0, 0.0}; else et = et / n;
    Vec3 ec = cross(zhat, et);  // circumferential
    n = norm(ec);
    if (n < 1e-8) {
      ec = cross(Vec3{1.0, 0.0, 0.0}, et);
      n = norm(ec);
    }
    ec = ec / n;
    const Vec3 el = cross(et, ec);  // longitudinal, base-ward

    const double alpha =
        lerp(spec.helix_endo_deg, spec.helix_epi_deg, tm) * kPi / 180.0;
    Frame f;
    f.fiber = ec * std::cos(alpha) + el * std::sin(alpha);
    f.sheet = et;
    f.normal = cross(f.fiber, f.sheet);
    const double nf = norm(f.fiber), nr = norm(f.normal);
    f.fiber = f.fiber / nf;
    f.normal = f.normal / nr;
    mesh.frames[e] = f;
  }

  validate_mesh(mesh);
  return mesh;
}

Mesh build_slab(const SlabSpec& spec) {
  if (spec.lx <= 0.0 || spec.ly <= 0.0 || spec.lz <= 0.0 || spec.edge_length <= 0.0)
    throw ValidationError("slab: dimensions and edge length must be positive");
  const int nx = std::max(1, static_cast<int>(std::round(spec.lx / spec.edge_length)));
  const int ny = std::max(1, static_cast<int>(std::round(spec.ly / spec.edge_length)));
  const int nz = std::max(1, static_cast<int>(std::round(spec.lz / spec.edge_length)));
  const double hx = spec.lx / nx, hy = spec.ly / ny, hz = spec.lz / nz;

  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int iz = 0; iz <= nz; ++iz)
    for (int iy = 0; iy <= ny; ++iy)
      for (int ix = 0; ix <= nx; ++ix) mesh.nodes.push_back({ix * hx, iy * hy, iz * hz});
  auto vid = [&](int ix, int iy, int iz) { return (iz * (ny + 1) + iy) * (nx + 1) + ix; };

  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::array<int, 8> cid;
        for (int c = 0; c < 8; ++c)
          cid[c] = vid(ix + (c & 1), iy + ((c >> 1) & 1), iz + ((c >> 2) & 1));
        for (const auto& kt : kCubeTets) {
          std::array<int, 4> t{cid[kt[0]], cid[kt[1]], cid[kt[2]], cid[kt[3]]};
          if (tet_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                         mesh.nodes[t[3]]) < 0.0)
            std::swap(t[2], t[3]);
          mesh.tets.push_back(t);
        }
      }

  mesh.frames.assign(mesh.tets.size(),
                     Frame{{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}});
  mesh.cobiveco.resize(mesh.nodes.size());
  mesh.surface_tags.resize(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const Vec3& p = mesh.nodes[i];
    mesh.cobiveco[i] = {clamp01(p.z / spec.lz), clamp01(p.x / spec.lx), 0.0, 0};
    mesh.surface_tags[i] = p.z == 0.0              ? SurfaceTag::lv_endo
                           : p.z >= spec.lz - 1e-12 ? SurfaceTag::epi
                                                    : SurfaceTag::none;
  }
  validate_mesh(mesh);
  return mesh;
}

}  // namespace cardiotwin

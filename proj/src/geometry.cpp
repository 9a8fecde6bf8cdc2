#include "cardiotwin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace cardiotwin {

const char* to_string(SurfaceTag t) {
  switch (t) {
    case SurfaceTag::none: return "none";
    case SurfaceTag::lv_endo: return "lv_endo";
    case SurfaceTag::rv_endo: return "rv_endo";
    case SurfaceTag::epi: return "epi";
  }
  return "none";
}

SurfaceTag surface_tag_from_string(const std::string& s) {
  if (s == "none") return SurfaceTag::none;
  if (s == "lv_endo") return SurfaceTag::lv_endo;
  if (s == "rv_endo") return SurfaceTag::rv_endo;
  if (s == "epi") return SurfaceTag::epi;
  throw FormatError("unknown surface tag '" + s + "'");
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(b - a, cross(c - a, d - a)) / 6.0;
}

double tet_volume(const Mesh& mesh, int e) {
  const auto& t = mesh.tets[e];
  return tet_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], mesh.nodes[t[3]]);
}

BoundingBox bounding_box(const std::vector<Vec3>& pts) {
  if (pts.empty()) throw ValidationError("bounding_box: empty point set");
  BoundingBox bb{pts[0], pts[0]};
  for (const auto& p : pts) {
    bb.lo.x = std::min(bb.lo.x, p.x);
    bb.lo.y = std::min(bb.lo.y, p.y);
    bb.lo.z = std::min(bb.lo.z, p.z);
    bb.hi.x = std::max(bb.hi.x, p.x);
    bb.hi.y = std::max(bb.hi.y, p.y);
    bb.hi.z = std::max(bb.hi.z, p.z);
  }
  return bb;
}

double mean_edge_length(const Mesh& mesh) {
  if (mesh.tets.empty()) throw ValidationError("mean_edge_length: mesh has no elements");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : mesh.tets) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        sum += norm(mesh.nodes[t[i]] - mesh.nodes[t[j]]);
        ++n;
      }
  }
  return sum / static_cast<double>(n);
}

MeshAdjacency build_adjacency(const Mesh& mesh) {
  const int nn = mesh.node_count();
  MeshAdjacency adj;
  adj.elem_offset.assign(nn + 1, 0);
  for (const auto& t : mesh.tets)
    for (int v : t) ++adj.elem_offset[v + 1];
  for (int i = 0; i < nn; ++i) adj.elem_offset[i + 1] += adj.elem_offset[i];
  adj.elem_list.resize(adj.elem_offset[nn]);
  {
    std::vector<int> cursor(adj.elem_offset.begin(), adj.elem_offset.end() - 1);
    for (int e = 0; e < mesh.elem_count(); ++e)
      for (int v : mesh.tets[e]) adj.elem_list[cursor[v]++] = e;
  }

  // Neighbor nodes, deduplicated per node, ascending.
  adj.node_offset.assign(nn + 1, 0);
  std::vector<int> scratch;
  std::vector<std::vector<int>> nbr(nn);
  for (const auto& t : mesh.tets)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) nbr[t[i]].push_back(t[j]);
  for (int i = 0; i < nn; ++i) {
    auto& v = nbr[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    adj.node_offset[i + 1] = adj.node_offset[i] + static_cast<int>(v.size());
  }
  adj.node_list.resize(adj.node_offset[nn]);
  for (int i = 0; i < nn; ++i)
    std::copy(nbr[i].begin(), nbr[i].end(), adj.node_list.begin() + adj.node_offset[i]);
  return adj;
}

void validate_mesh(const Mesh& mesh) {
  const int nn = mesh.node_count();
  const int ne = mesh.elem_count();
  if (nn == 0 || ne == 0) throw ValidationError("mesh is empty");
  if (static_cast<int>(mesh.cobiveco.size()) != nn)
    throw ValidationError("mesh: cobiveco size does not match node count");
  if (static_cast<int>(mesh.surface_tags.size()) != nn)
    throw ValidationError("mesh: surface tag size does not match node count");
  if (static_cast<int>(mesh.frames.size()) != ne)
    throw ValidationError("mesh: frame count does not match element count");

  for (const auto& t : mesh.tets) {
    for (int v : t)
      if (v < 0 || v >= nn) throw ValidationError("mesh: tet node index out of range");
    if (t[0] == t[1] || t[0] == t[2] || t[0] == t[3] || t[1] == t[2] || t[1] == t[3] ||
        t[2] == t[3])
      throw ValidationError("mesh: tet with repeated node");
  }

  for (int e = 0; e < ne; ++e)
    if (!(tet_volume(mesh, e) > 0.0))
      throw ValidationError("mesh: non-positive tet volume at element " + std::to_string(e));

  constexpr double tol = 1e-6;
  for (int e = 0; e < ne; ++e) {
    const Frame& f = mesh.frames[e];
    const bool unit = std::abs(norm(f.fiber) - 1.0) < tol && std::abs(norm(f.sheet) - 1.0) < tol &&
                      std::abs(norm(f.normal) - 1.0) < tol;
    const bool ortho = std::abs(dot(f.fiber, f.sheet)) < tol &&
                       std::abs(dot(f.fiber, f.normal)) < tol &&
                       std::abs(dot(f.sheet, f.normal)) < tol;
    if (!unit || !ortho)
      throw ValidationError("mesh: non-orthonormal frame at element " + std::to_string(e));
  }

  for (int i = 0; i < nn; ++i) {
    try {
      validate(mesh.cobiveco[i]);
    } catch (const ValidationError& err) {
      throw ValidationError("mesh node " + std::to_string(i) + ": " + err.what());
    }
  }

  // Connectivity over the node graph.
  const MeshAdjacency adj = build_adjacency(mesh);
  std::vector<char> seen(nn, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int k = adj.node_offset[v]; k < adj.node_offset[v + 1]; ++k) {
      const int w = adj.node_list[k];
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != nn)
    throw ValidationError("mesh is not a single connected component (" +
                          std::to_string(nn - reached) + " unreachable nodes)");
}

}  // namespace cardiotwin

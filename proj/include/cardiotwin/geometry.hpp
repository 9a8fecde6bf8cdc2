#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cardiotwin/cobiveco.hpp"
#include "cardiotwin/types.hpp"

namespace cardiotwin {

enum class SurfaceTag : std::uint8_t { none = 0, lv_endo = 1, rv_endo = 2, epi = 3 };

const char* to_string(SurfaceTag t);
SurfaceTag surface_tag_from_string(const std::string& s);  // throws FormatError

// Orthonormal local material frame of one element:
// fiber (fast), sheet (transmural), sheet-normal.
struct Frame {
  Vec3 fiber, sheet, normal;
};

// Tetrahedral biventricular mesh. Positions in mm. Per-element frames,
// per-node coordinates and surface tags. Tets are zero-based node quadruples
// ordered so the signed volume is positive.
struct Mesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 4>> tets;
  std::vector<Frame> frames;
  std::vector<CobivecoCoord> cobiveco;
  std::vector<SurfaceTag> surface_tags;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int elem_count() const { return static_cast<int>(tets.size()); }
};

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
double tet_volume(const Mesh& mesh, int e);

struct BoundingBox {
  Vec3 lo, hi;
  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  double diagonal() const { return norm(hi - lo); }
};
BoundingBox bounding_box(const std::vector<Vec3>& pts);  // throws on empty

double mean_edge_length(const Mesh& mesh);

// CSR adjacency: node -> incident elements and node -> neighbor nodes.
struct MeshAdjacency {
  std::vector<int> elem_offset, elem_list;
  std::vector<int> node_offset, node_list;
};
MeshAdjacency build_adjacency(const Mesh& mesh);

// Full structural check: array sizes agree, indices in range, every element
// has positive volume, frames orthonormal to 1e-6, coordinates in range, and
// the element graph is a single connected component. Throws ValidationError.
void validate_mesh(const Mesh& mesh);

// Idealized biventricular geometry: two truncated ellipsoidal shells joined
// at the septum, long axis along z, apex down, truncated by the base plane.
// The RV shell is thinner, shifted toward +x, and stops short of the apex.
struct PhantomSpec {
  Vec3 lv_outer{45.0, 45.0, 80.0};  // semi-axes, mm
  Vec3 lv_inner{35.0, 35.0, 70.0};
  Vec3 rv_outer{45.0, 40.0, 65.0};
  Vec3 rv_inner{39.0, 34.0, 59.0};
  double base_height = 15.0;    // truncation plane z, mm
  double edge_length = 4.0;     // target lattice spacing h, mm
  double helix_endo_deg = 60.0; // fiber helix angle at tm = 0
  double helix_epi_deg = -60.0; // fiber helix angle at tm = 1

  void validate() const;  // throws ValidationError
};

// Deterministic for a fixed (spec, seed); the seed drives only the interior
// node jitter that breaks lattice alignment.
Mesh build_phantom(const PhantomSpec& spec, std::uint64_t seed);

// Axis-aligned rectangular slab used by solver verification: x in [0,lx],
// y in [0,ly], z in [0,lz]. Frames are the global axes (fiber +x, sheet +z,
// normal +y), tm runs across z, the z=0 face is tagged lv_endo and the z=lz
// face epi.
struct SlabSpec {
  double lx = 60.0, ly = 20.0, lz = 10.0;
  double edge_length = 4.0;
};
Mesh build_slab(const SlabSpec& spec);

}  // namespace cardiotwin

#include "doctest.h"

#include "cardiotwin/eikonal.hpp"
#include "cardiotwin/geometry.hpp"
#include "cardiotwin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace cardiotwin;

namespace {

std::vector<std::array<double, 3>> uniform_speed(const Mesh& m, double v_cms) {
  return std::vector<std::array<double, 3>>(m.elem_count(), {v_cms, v_cms, v_cms});
}

int node_at(const Mesh& m, const Vec3& p) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.node_count(); ++i) {
    const double d = norm(m.nodes[i] - p);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  REQUIRE(bd < 1e-9);  // tests address exact lattice nodes
  return best;
}

RootNodes single_root(int node, double delay = 0.0) {
  RootNodes r;
  r.entries.push_back({node, delay});
  return r;
}

}  // namespace

TEST_SUITE("eikonal") {

TEST_CASE("isotropic slab: activation approximates Euclidean distance over speed") {
  const Mesh slab = build_slab(SlabSpec{});
  // 100 cm/s = 1 mm/ms, so t should equal the distance in mm.
  const auto speeds = uniform_speed(slab, 100.0);
  const int root = node_at(slab, {0, 0, 0});
  const ActivationMap atm = solve_activation(slab, speeds, single_root(root));

  CHECK(atm.unreachable_count() == 0);
  CHECK(atm.t_ms[root] == 0.0);

  double max_t = 0.0, max_err = 0.0;
  for (int i = 0; i < slab.node_count(); ++i) {
    const double exact = norm(slab.nodes[i] - slab.nodes[root]);
    max_t = std::max(max_t, atm.t_ms[i]);
    max_err = std::max(max_err, std::abs(atm.t_ms[i] - exact));
    // Discrete front never beats the straight line.
    CHECK(atm.t_ms[i] >= exact - 1e-6);
  }
  CHECK(max_err / max_t <= 0.05);
}

TEST_CASE("root delays become exact boundary times after normalization") {
  const Mesh slab = build_slab(SlabSpec{});
  const auto speeds = uniform_speed(slab, 100.0);
  const int a = node_at(slab, {0, 0, 0});
  const int b = node_at(slab, {60, 20, 0});

  RootNodes roots;
  roots.entries.push_back({a, 0.0});
  roots.entries.push_back({b, 10.0});
  ActivationMap atm = solve_activation(slab, speeds, roots);
  CHECK(atm.t_ms[a] == 0.0);
  CHECK(atm.t_ms[b] <= 10.0);  // the late root may be overtaken by the wave
  CHECK(atm.t_ms[b] > 0.0);

  // A constant shift of every delay cancels out.
  RootNodes shifted;
  shifted.entries.push_back({a, 5.0});
  shifted.entries.push_back({b, 15.0});
  const ActivationMap atm2 = solve_activation(slab, speeds, shifted);
  for (int i = 0; i < slab.node_count(); ++i)
    CHECK(atm2.t_ms[i] == doctest::Approx(atm.t_ms[i]).epsilon(1e-12));

  // Close roots with a huge delay gap: the early wave reaches the late root
  // before its own delay, so the late boundary value is not binding.
  RootNodes pair;
  pair.entries.push_back({a, 0.0});
  pair.entries.push_back({node_at(slab, {4, 0, 0}), 100.0});
  const ActivationMap atm3 = solve_activation(slab, speeds, pair);
  CHECK(atm3.t_ms[pair.entries[1].node] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("two zero-delay roots equal the pointwise minimum of single-root solves") {
  const Mesh slab = build_slab(SlabSpec{});
  const auto speeds = uniform_speed(slab, 80.0);
  const int a = node_at(slab, {0, 0, 0});
  const int b = node_at(slab, {60, 20, 10});

  const ActivationMap ta = solve_activation(slab, speeds, single_root(a));
  const ActivationMap tb = solve_activation(slab, speeds, single_root(b));
  RootNodes both;
  both.entries.push_back({a, 0.0});
  both.entries.push_back({b, 0.0});
  const ActivationMap tab = solve_activation(slab, speeds, both);

  for (int i = 0; i < slab.node_count(); ++i)
    CHECK(std::abs(tab.t_ms[i] - std::min(ta.t_ms[i], tb.t_ms[i])) <= 2e-3);
}

TEST_CASE("causality: every non-root node activates strictly after some neighbor") {
  const Mesh slab = build_slab(SlabSpec{});
  std::vector<std::array<double, 3>> speeds(slab.elem_count(), {65.0, 48.0, 51.0});
  const int root = node_at(slab, {0, 0, 0});
  const ActivationMap atm = solve_activation(slab, speeds, single_root(root));
  const MeshAdjacency adj = build_adjacency(slab);

  for (int i = 0; i < slab.node_count(); ++i) {
    if (i == root) continue;
    double nb_min = std::numeric_limits<double>::infinity();
    for (int k = adj.node_offset[i]; k < adj.node_offset[i + 1]; ++k)
      nb_min = std::min(nb_min, atm.t_ms[adj.node_list[k]]);
    CHECK(atm.t_ms[i] > nb_min);
  }
}

TEST_CASE("scaling all speeds by c divides times by c") {
  const Mesh slab = build_slab(SlabSpec{});
  std::vector<std::array<double, 3>> base(slab.elem_count(), {65.0, 48.0, 51.0});
  std::vector<std::array<double, 3>> doubled(slab.elem_count(), {130.0, 96.0, 102.0});
  const int root = node_at(slab, {0, 0, 0});
  const ActivationMap t1 = solve_activation(slab, base, single_root(root));
  const ActivationMap t2 = solve_activation(slab, doubled, single_root(root));
  for (int i = 0; i < slab.node_count(); ++i)
    CHECK(std::abs(t2.t_ms[i] - t1.t_ms[i] / 2.0) <= 2e-3);
}

TEST_CASE("anisotropy: fiber-to-sheet arrival ratio matches the speed ratio") {
  SlabSpec spec;
  spec.lx = 20.0;
  spec.ly = 8.0;
  spec.lz = 20.0;
  spec.edge_length = 2.0;
  const Mesh slab = build_slab(spec);
  // fiber +x at 65, sheet +z at 48, sheet-normal +y at 51 cm/s.
  std::vector<std::array<double, 3>> speeds(slab.elem_count(), {65.0, 48.0, 51.0});
  const int root = node_at(slab, {0, 0, 0});
  const ActivationMap atm = solve_activation(slab, speeds, single_root(root));

  const double t_fiber = atm.t_ms[node_at(slab, {16, 0, 0})];
  const double t_sheet = atm.t_ms[node_at(slab, {0, 0, 16})];
  CHECK(t_fiber / t_sheet == doctest::Approx(48.0 / 65.0).epsilon(0.05));
  CHECK(t_fiber == doctest::Approx(16.0 / 0.65).epsilon(0.05));
  CHECK(t_sheet == doctest::Approx(16.0 / 0.48).epsilon(0.05));
}

TEST_CASE("slowing a block of elements never accelerates any node") {
  const Mesh slab = build_slab(SlabSpec{});
  auto healthy = uniform_speed(slab, 65.0);
  auto slowed = healthy;
  for (int e = 0; e < slab.elem_count(); ++e) {
    Vec3 c{0, 0, 0};
    for (int v : slab.tets[e]) c = c + slab.nodes[v];
    if (c.x / 4.0 > 20.0 && c.x / 4.0 < 40.0)
      slowed[e] = {6.5, 6.5, 6.5};
  }
  const int root = node_at(slab, {0, 0, 0});
  const ActivationMap th = solve_activation(slab, healthy, single_root(root));
  const ActivationMap tm = solve_activation(slab, slowed, single_root(root));
  bool any_later = false;
  for (int i = 0; i < slab.node_count(); ++i) {
    CHECK(tm.t_ms[i] >= th.t_ms[i] - 2e-3);
    any_later = any_later || tm.t_ms[i] > th.t_ms[i] + 1.0;
  }
  CHECK(any_later);
}

TEST_CASE("disconnected nodes are reported unreachable") {
  Mesh m;
  m.nodes = {{0, 0, 0}, {4, 0, 0}, {0, 4, 0}, {0, 0, 4},
             {100, 0, 0}, {104, 0, 0}, {100, 4, 0}, {100, 0, 4}};
  m.tets = {{0, 1, 2, 3}, {4, 5, 6, 7}};
  Frame f;
  f.fiber = {1, 0, 0};
  f.sheet = {0, 0, 1};
  f.normal = {0, 1, 0};
  m.frames = {f, f};
  m.cobiveco.resize(8);
  m.surface_tags.assign(8, SurfaceTag::none);

  const ActivationMap atm = solve_activation(m, uniform_speed(m, 100.0), single_root(0));
  CHECK(atm.unreachable_count() == 4);
  CHECK(std::isinf(atm.t_ms[5]));
  CHECK(atm.max_finite() == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("solver input validation") {
  const Mesh slab = build_slab(SlabSpec{});
  auto speeds = uniform_speed(slab, 100.0);

  CHECK_THROWS_AS(solve_activation(slab, speeds, RootNodes{}), ValidationError);
  CHECK_THROWS_AS(solve_activation(slab, speeds, single_root(slab.node_count())),
                  ValidationError);
  CHECK_THROWS_AS(solve_activation(slab, speeds, single_root(-1)), ValidationError);

  auto bad = speeds;
  bad[3][1] = 0.0;
  CHECK_THROWS_AS(solve_activation(slab, bad, single_root(0)), ValidationError);

  speeds.pop_back();
  CHECK_THROWS_AS(solve_activation(slab, speeds, single_root(0)), ValidationError);
}

TEST_CASE("oracle: single tet line of sight is exact") {
  Mesh m;
  m.nodes = {{0, 0, 0}, {6, 0, 0}, {0, 6, 0}, {0, 0, 6}};
  m.tets = {{0, 1, 2, 3}};
  Frame f;
  f.fiber = {1, 0, 0};
  f.sheet = {0, 0, 1};
  f.normal = {0, 1, 0};
  m.frames = {f};
  m.cobiveco.resize(4);
  m.surface_tags.assign(4, SurfaceTag::none);

  // 60 cm/s = 0.6 mm/ms; the 6 mm edge takes exactly 10 ms.
  const ActivationMap atm = oracle_activation(m, uniform_speed(m, 60.0), single_root(0), 1);
  CHECK(atm.t_ms[1] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(atm.t_ms[2] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(atm.t_ms[3] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("oracle: refinement only shortens paths; solver stays within its bound") {
  SlabSpec spec;
  spec.lx = 24.0;
  spec.ly = 12.0;
  spec.lz = 8.0;
  const Mesh slab = build_slab(spec);
  std::vector<std::array<double, 3>> speeds(slab.elem_count(), {65.0, 48.0, 51.0});
  const int root = node_at(slab, {0, 0, 0});

  const ActivationMap o1 = oracle_activation(slab, speeds, single_root(root), 1);
  const ActivationMap o3 = oracle_activation(slab, speeds, single_root(root), 3);
  double mean1 = 0.0, mean3 = 0.0;
  for (int i = 0; i < slab.node_count(); ++i) {
    mean1 += o1.t_ms[i];
    mean3 += o3.t_ms[i];
    CHECK(o3.t_ms[i] <= o1.t_ms[i] + 1e-9);
  }
  CHECK(mean3 <= mean1);

  // Solver and oracle are both upper bounds of the continuum front with
  // different local discretization error, so neither dominates the other
  // pointwise; they agree within a few percent of the span.
  const ActivationMap solver = solve_activation(slab, speeds, single_root(root));
  const double span = solver.max_finite();
  double mean_gap = 0.0;
  for (int i = 0; i < slab.node_count(); ++i) {
    CHECK(std::abs(solver.t_ms[i] - o3.t_ms[i]) <= 0.05 * span);
    mean_gap += std::abs(o3.t_ms[i] - solver.t_ms[i]);
  }
  mean_gap /= slab.node_count();
  CHECK(mean_gap <= 0.03 * span);
}

TEST_CASE("default roots on the phantom: 7 sites, 4 LV + 3 RV, deterministic") {
  const Mesh m = build_phantom(PhantomSpec{}, 1);
  const RootNodes roots = default_roots(m);
  REQUIRE(roots.entries.size() == 7);

  int lv = 0, rv = 0;
  std::set<int> unique_nodes;
  for (const auto& r : roots.entries) {
    CHECK(r.delay_ms == 0.0);
    const SurfaceTag tag = m.surface_tags[r.node];
    CHECK((tag == SurfaceTag::lv_endo || tag == SurfaceTag::rv_endo));
    (m.cobiveco[r.node].tv == 0 ? lv : rv)++;
    unique_nodes.insert(r.node);
  }
  CHECK(lv == 4);
  CHECK(rv == 3);
  CHECK(unique_nodes.size() == 7);

  const RootNodes again = default_roots(m);
  for (std::size_t i = 0; i < 7; ++i) CHECK(again.entries[i].node == roots.entries[i].node);

  // Zero delays mean all roots activate at t = 0.
  TissueLabeling none;
  none.node_class.assign(m.node_count(), TissueClass::healthy);
  const auto speeds = conduction_field(m, none, CvConfig{});
  const ActivationMap atm = solve_activation(m, speeds, roots);
  for (const auto& r : roots.entries) CHECK(atm.t_ms[r.node] == 0.0);
  CHECK(atm.unreachable_count() == 0);
}

TEST_CASE("place_roots requires endocardial tags") {
  Mesh slab = build_slab(SlabSpec{});
  slab.surface_tags.assign(slab.node_count(), SurfaceTag::none);
  CHECK_THROWS_AS(default_roots(slab), ValidationError);
}

}  // TEST_SUITE

#include "doctest.h"

#include "cardiotwin/scenario.hpp"

#include <cmath>
#include <set>

using namespace cardiotwin;

namespace {

CobivecoCoord cc(double tm, double ab, double rt, int tv) {
  CobivecoCoord c;
  c.tm = tm;
  c.ab = ab;
  c.rt = rt;
  c.tv = tv;
  return c;
}

// Mesh stub carrying only coordinates; enough for label_tissue.
Mesh coord_mesh(const std::vector<CobivecoCoord>& coords) {
  Mesh m;
  m.nodes.assign(coords.size(), Vec3{0, 0, 0});
  m.cobiveco = coords;
  m.surface_tags.assign(coords.size(), SurfaceTag::none);
  return m;
}

InfarctSpec make_infarct(double tm0, double ab0, double rt0, double r_tm, double r_ab,
                         double r_rt, double bz_scale = 1.5) {
  InfarctSpec inf;
  inf.center = cc(tm0, ab0, rt0, 0);
  inf.r_tm = r_tm;
  inf.r_ab = r_ab;
  inf.r_rt = r_rt;
  inf.bz_scale = bz_scale;
  return inf;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("InfarctSpec validation") {
  CHECK_NOTHROW(make_infarct(0.0, 0.5, 0.1, 3.0, 0.3, 0.15).validate());

  InfarctSpec neg = make_infarct(0.0, 0.5, 0.1, -0.1, 0.3, 0.15);
  CHECK_THROWS_AS(neg.validate(), ValidationError);

  InfarctSpec shrunk_bz = make_infarct(0.0, 0.5, 0.1, 0.2, 0.3, 0.15, 0.9);
  CHECK_THROWS_AS(shrunk_bz.validate(), ValidationError);

  InfarctSpec rv_center = make_infarct(0.0, 0.5, 0.1, 0.2, 0.3, 0.15);
  rv_center.center.tv = 1;  // rt = 0.1 on the RV side: free wall, not LV
  CHECK_THROWS_AS(rv_center.validate(), ValidationError);

  InfarctSpec bad_coord = make_infarct(2.0, 0.5, 0.1, 0.2, 0.3, 0.15);
  CHECK_THROWS_AS(bad_coord.validate(), ValidationError);
}

TEST_CASE("label_tissue: center, boundary, border zone, wrap-around") {
  const InfarctSpec inf = make_infarct(0.2, 0.5, 0.1, 0.2, 0.3, 0.15);
  const std::vector<CobivecoCoord> coords = {
      cc(0.2, 0.5, 0.1, 0),                        // 0: exact center
      cc(0.4, 0.5, 0.1, 0),                        // 1: tm offset exactly r_tm
      cc(0.2 + 0.2 * std::sqrt(1.2), 0.5, 0.1, 0), // 2: value 1.2 -> border zone
      cc(0.2 + 0.2 * 1.51, 0.5, 0.1, 0),           // 3: just past the bz shell
      cc(0.2, 0.5, 0.97, 0),                       // 4: rotational wrap, -0.13 away
      cc(0.2, 0.5, 0.1, 1),                        // 5: RV free wall at the center coords
  };
  const TissueLabeling lab = label_tissue(coord_mesh(coords), inf);
  CHECK(lab.node_class[0] == TissueClass::scar);
  CHECK(lab.node_class[1] == TissueClass::scar);
  CHECK(lab.node_class[2] == TissueClass::bz);
  CHECK(lab.node_class[3] == TissueClass::healthy);
  CHECK(lab.node_class[4] == TissueClass::scar);
  CHECK(lab.node_class[5] == TissueClass::healthy);
}

TEST_CASE("label_tissue: septal RV-side nodes are eligible, free wall never") {
  const InfarctSpec inf = make_infarct(0.2, 0.5, 0.8, 0.2, 0.3, 0.15);
  const std::vector<CobivecoCoord> coords = {
      cc(0.2, 0.5, 0.8, 1),  // septum seen from the RV side
      cc(0.2, 0.5, 0.5, 1),  // RV free wall
  };
  const TissueLabeling lab = label_tissue(coord_mesh(coords), inf);
  CHECK(lab.node_class[0] == TissueClass::scar);
  CHECK(lab.node_class[1] == TissueClass::healthy);
}

TEST_CASE("label_tissue: zero radius admits only exact coordinate equality") {
  const InfarctSpec inf = make_infarct(0.0, 0.5, 0.1, 0.0, 0.3, 0.15);
  const std::vector<CobivecoCoord> coords = {
      cc(0.0, 0.5, 0.1, 0),
      cc(1e-9, 0.5, 0.1, 0),
      cc(0.0, 0.6, 0.1, 0),  // inside the other radii, tm matches exactly
  };
  const TissueLabeling lab = label_tissue(coord_mesh(coords), inf);
  CHECK(lab.node_class[0] == TissueClass::scar);
  CHECK(lab.node_class[1] == TissueClass::healthy);
  CHECK(lab.node_class[2] == TissueClass::scar);
}

TEST_CASE("label_tissue properties on a coordinate grid") {
  std::vector<CobivecoCoord> coords;
  for (int it = 0; it <= 10; ++it)
    for (int ia = 0; ia <= 10; ++ia)
      for (int ir = 0; ir < 12; ++ir) coords.push_back(cc(it / 10.0, ia / 10.0, ir / 12.0, 0));
  const Mesh mesh = coord_mesh(coords);

  const InfarctSpec small = make_infarct(0.0, 0.5, 0.25, 0.5, 0.2, 0.1);
  InfarctSpec big = small;
  big.r_ab = 0.4;

  const TissueLabeling ls = label_tissue(mesh, small);
  const TissueLabeling lb = label_tissue(mesh, big);

  // Enlarging a radius only grows the scar set.
  int small_scar = 0, big_scar = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (ls.node_class[i] == TissueClass::scar) {
      ++small_scar;
      CHECK(lb.node_class[i] == TissueClass::scar);
    }
    if (lb.node_class[i] == TissueClass::scar) ++big_scar;
  }
  CHECK(small_scar > 0);
  CHECK(big_scar > small_scar);

  // kappa = 1 leaves no border zone.
  InfarctSpec tight = small;
  tight.bz_scale = 1.0;
  CHECK(label_tissue(mesh, tight).count(TissueClass::bz) == 0);
  CHECK(ls.count(TissueClass::bz) > 0);

  // Determinism.
  const TissueLabeling again = label_tissue(mesh, small);
  CHECK(again.node_class == ls.node_class);
}

TEST_CASE("conduction_field: layer rule, worst-node slowing, mismatch error") {
  // Two tets sharing a face; element 0 sits in the subendocardial layer.
  Mesh m;
  m.nodes = {{0, 0, 0}, {4, 0, 0}, {0, 4, 0}, {0, 0, 4}, {2, 2, -4}};
  m.tets = {{0, 1, 2, 3}, {0, 2, 1, 4}};
  Frame f;
  f.fiber = {1, 0, 0};
  f.sheet = {0, 0, 1};
  f.normal = {0, 1, 0};
  m.frames = {f, f};
  m.cobiveco = {cc(0.0, 0.5, 0.1, 0), cc(0.03, 0.5, 0.1, 0), cc(0.05, 0.5, 0.1, 0),
                cc(0.04, 0.5, 0.1, 0), cc(0.5, 0.5, 0.1, 0)};
  m.surface_tags = {SurfaceTag::lv_endo, SurfaceTag::none, SurfaceTag::none, SurfaceTag::none,
                    SurfaceTag::none};

  TissueLabeling healthy;
  healthy.node_class.assign(5, TissueClass::healthy);
  CvConfig cv;

  auto speeds = conduction_field(m, healthy, cv);
  REQUIRE(speeds.size() == 2);
  // Element 0: all nodes within tm <= 0.05 and touching the endocardium.
  CHECK(speeds[0][0] == doctest::Approx(150.0));
  CHECK(speeds[0][1] == doctest::Approx(48.0));
  CHECK(speeds[0][2] == doctest::Approx(100.0));
  // Element 1 contains a mid-wall node: base speeds.
  CHECK(speeds[1][0] == doctest::Approx(65.0));
  CHECK(speeds[1][1] == doctest::Approx(48.0));
  CHECK(speeds[1][2] == doctest::Approx(51.0));

  // A single scar node slows every element containing it by scar_fraction.
  TissueLabeling one_scar = healthy;
  one_scar.node_class[4] = TissueClass::scar;
  speeds = conduction_field(m, one_scar, cv);
  CHECK(speeds[1][0] == doctest::Approx(6.5));
  CHECK(speeds[1][1] == doctest::Approx(4.8));
  CHECK(speeds[1][2] == doctest::Approx(5.1));
  // Scar scaling applies on top of the endocardial layer speeds.
  TissueLabeling scar0 = healthy;
  scar0.node_class[0] = TissueClass::scar;
  speeds = conduction_field(m, scar0, cv);
  CHECK(speeds[0][0] == doctest::Approx(15.0));
  CHECK(speeds[0][2] == doctest::Approx(10.0));

  // Scar beats bz within one element.
  TissueLabeling mixed = healthy;
  mixed.node_class[4] = TissueClass::scar;
  mixed.node_class[1] = TissueClass::bz;
  speeds = conduction_field(m, mixed, cv);
  CHECK(speeds[1][0] == doctest::Approx(6.5));

  // Border zone with the slowed-conduction fractions.
  TissueLabeling one_bz = healthy;
  one_bz.node_class[4] = TissueClass::bz;
  CvConfig slow = cv;
  slow.scar_fraction = 0.05;
  slow.bz_fraction = 0.25;
  speeds = conduction_field(m, one_bz, slow);
  CHECK(speeds[1][0] == doctest::Approx(16.25));
  CHECK(speeds[1][1] == doctest::Approx(12.0));
  CHECK(speeds[1][2] == doctest::Approx(12.75));

  // Shallow nodes without an endocardial tag stay at base speeds.
  Mesh untagged = m;
  untagged.surface_tags.assign(5, SurfaceTag::none);
  speeds = conduction_field(untagged, healthy, cv);
  CHECK(speeds[0][0] == doctest::Approx(65.0));

  TissueLabeling short_lab;
  short_lab.node_class.assign(3, TissueClass::healthy);
  CHECK_THROWS_AS(conduction_field(m, short_lab, cv), ValidationError);
}

TEST_CASE("catalogue: 17 scenarios, extents, slow-CV entry last") {
  const CvConfig base;
  const std::vector<ScenarioSpec> cat = scenario_catalogue(base);
  REQUIRE(cat.size() == 17);

  std::set<std::string> names;
  for (const auto& s : cat) names.insert(s.name);
  CHECK(names.size() == 17);

  int slow_count = 0;
  for (const auto& s : cat) {
    CHECK(s.infarct.center.tm == 0.0);
    CHECK(s.infarct.center.tv == 0);
    if (s.cv.scar_fraction == 0.05 && s.cv.bz_fraction == 0.25) ++slow_count;
    if (s.name.find("-transmural") != std::string::npos)
      CHECK(s.infarct.r_tm == 3.0);
    else
      CHECK(s.infarct.r_tm == 0.5);
  }
  CHECK(slow_count == 1);
  CHECK(cat.back().name == "lateral-large-transmural-slowcv");
  CHECK(cat.back().cv.scar_fraction == 0.05);
  CHECK(cat.back().infarct.r_tm == 3.0);

  const ScenarioSpec& large = find_scenario(cat, "lateral-large-transmural");
  const ScenarioSpec& small = find_scenario(cat, "lateral-small-transmural");
  CHECK(small.infarct.r_ab == doctest::Approx(large.infarct.r_ab / 2.0));
  CHECK(small.infarct.r_rt == doctest::Approx(large.infarct.r_rt / 2.0));
  CHECK(small.infarct.center.ab == large.infarct.center.ab);
  CHECK(small.infarct.center.rt == large.infarct.center.rt);

  // The slow-CV entry shares the lateral-large-transmural footprint.
  CHECK(cat.back().infarct.r_ab == large.infarct.r_ab);
  CHECK(cat.back().infarct.r_rt == large.infarct.r_rt);
}

TEST_CASE("catalogue covers the seven named walls in both extents") {
  const std::vector<ScenarioSpec> cat = scenario_catalogue(CvConfig{});
  for (const char* wall : {"septal", "apical", "extensive-anterior", "limited-anterior",
                           "lateral-large", "inferior", "inferolateral", "lateral-small"}) {
    CHECK_NOTHROW(find_scenario(cat, std::string(wall) + "-transmural"));
    CHECK_NOTHROW(find_scenario(cat, std::string(wall) + "-subendocardial"));
  }
}

TEST_CASE("find_scenario error lists valid names; custom locations need lateral-large") {
  const std::vector<ScenarioSpec> cat = scenario_catalogue(CvConfig{});
  try {
    find_scenario(cat, "no-such-wall");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("no-such-wall") != std::string::npos);
    CHECK(msg.find("septal-transmural") != std::string::npos);
  }

  CatalogueConfig cfg;
  cfg.locations = {{"septal", 0.5, 5.0 / 6.0, 0.3, 0.12}};
  CHECK_THROWS_AS(scenario_catalogue(CvConfig{}, cfg), ValidationError);
}

TEST_CASE("tissue class string round-trip") {
  for (TissueClass c : {TissueClass::healthy, TissueClass::scar, TissueClass::bz})
    CHECK(tissue_class_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(tissue_class_from_string("necrotic"), FormatError);
}

}  // TEST_SUITE

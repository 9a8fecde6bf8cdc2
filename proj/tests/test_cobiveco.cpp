#include "doctest.h"

#include "cardiotwin/cobiveco.hpp"

#include <cmath>
#include <random>

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

}  // namespace

TEST_SUITE("cobiveco") {

TEST_CASE("validate accepts the documented ranges and rejects everything else") {
  CHECK_NOTHROW(validate(cc(0.0, 0.0, 0.0, 0)));
  CHECK_NOTHROW(validate(cc(1.0, 1.0, 0.999999, 1)));
  CHECK_NOTHROW(validate(cc(0.5, 0.5, 0.5, 0)));

  CHECK_THROWS_AS(validate(cc(-0.1, 0.5, 0.5, 0)), ValidationError);
  CHECK_THROWS_AS(validate(cc(1.1, 0.5, 0.5, 0)), ValidationError);
  CHECK_THROWS_AS(validate(cc(0.5, -0.01, 0.5, 0)), ValidationError);
  CHECK_THROWS_AS(validate(cc(0.5, 1.2, 0.5, 0)), ValidationError);
  // rt is half-open: 1.0 is the same point as 0.0 and therefore invalid.
  CHECK_THROWS_AS(validate(cc(0.5, 0.5, 1.0, 0)), ValidationError);
  CHECK_THROWS_AS(validate(cc(0.5, 0.5, -0.2, 0)), ValidationError);
  CHECK_THROWS_AS(validate(cc(0.5, 0.5, 0.5, 2)), ValidationError);
  CHECK_THROWS_AS(validate(cc(0.5, 0.5, 0.5, -1)), ValidationError);
}

TEST_CASE("in_lv covers the LV free wall and the whole septum") {
  CHECK(in_lv(cc(0.5, 0.5, 0.1, 0)));
  CHECK_FALSE(in_lv(cc(0.5, 0.5, 0.5, 1)));
  CHECK(in_lv(cc(0.5, 0.5, 0.8, 1)));
  // Threshold is strict: rt exactly at the anterior-septal junction on the
  // RV side is free wall, not septum.
  CHECK_FALSE(in_lv(cc(0.5, 0.5, 2.0 / 3.0, 1)));
  CHECK(in_lv(cc(0.5, 0.5, std::nextafter(2.0 / 3.0, 1.0), 1)));
}

TEST_CASE("rt_delta wraps, is signed, and breaks antipodal ties toward +0.5") {
  CHECK(rt_delta(0.1, 0.9) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(rt_delta(0.9, 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rt_delta(0.25, 0.5) == doctest::Approx(0.25).epsilon(1e-12));

  for (double x : {0.0, 0.1, 0.33, 0.5, 0.75, 0.999}) CHECK(rt_delta(x, x) == 0.0);

  // Antipodal pairs resolve to +0.5 regardless of argument order.
  CHECK(rt_delta(0.0, 0.5) == 0.5);
  CHECK(rt_delta(0.5, 0.0) == 0.5);
  CHECK(rt_delta(0.25, 0.75) == 0.5);
  CHECK(rt_delta(0.75, 0.25) == 0.5);
}

TEST_CASE("rt_delta range and antisymmetry off the tie") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const double d = rt_delta(a, b);
    CHECK(d > -0.5);
    CHECK(d <= 0.5);
    // b is recovered by walking the signed delta from a (mod 1).
    CHECK(fract(a + d) == doctest::Approx(fract(b)).epsilon(1e-9));
    if (std::abs(d) < 0.5 - 1e-9) CHECK(rt_delta(b, a) == doctest::Approx(-d).epsilon(1e-12));
  }
}

TEST_CASE("coord_distance2 is zero on identity and dominated by chamber mismatch") {
  const CobivecoCoord a = cc(0.3, 0.6, 0.9, 0);
  CHECK(coord_distance2(a, a) == 0.0);

  // Periodic rt: 0.95 vs 0.05 is a 0.1 step, not 0.9.
  CHECK(coord_distance2(cc(0, 0, 0.95, 0), cc(0, 0, 0.05, 0)) ==
        doctest::Approx(0.01).epsilon(1e-12));

  // The largest same-chamber distance (1 + 1 + 0.25) stays below the pure
  // chamber-mismatch term, so a matching chamber always wins when available.
  const double worst_same = coord_distance2(cc(0, 0, 0.0, 0), cc(1, 1, 0.5, 0));
  const double pure_tv = coord_distance2(cc(0, 0, 0, 0), cc(0, 0, 0, 1));
  CHECK(worst_same == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(pure_tv == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(worst_same < pure_tv);

  // Symmetry.
  const CobivecoCoord b = cc(0.8, 0.1, 0.2, 1);
  CHECK(coord_distance2(a, b) == doctest::Approx(coord_distance2(b, a)).epsilon(1e-15));
}

TEST_CASE("aha_segment: apex cap and ring boundaries") {
  CHECK(aha_segment(cc(0.5, 0.05, 0.3, 0)) == 17);
  CHECK(aha_segment(cc(0.5, 0.0, 0.9, 0)) == 17);
  // Ring intervals are half-open at the bottom: ab = 0.1 is still cap,
  // ab = 1/3 still apical, ab = 2/3 still mid.
  CHECK(aha_segment(cc(0.5, 0.1, 0.3, 0)) == 17);
  const int apical = aha_segment(cc(0.5, 1.0 / 3.0, 7.0 / 12.0, 0));
  CHECK(apical >= 13);
  CHECK(apical <= 16);
  const int mid = aha_segment(cc(0.5, 2.0 / 3.0, 7.0 / 12.0, 0));
  CHECK(mid >= 7);
  CHECK(mid <= 12);
  const int base = aha_segment(cc(0.5, 1.0, 7.0 / 12.0, 0));
  CHECK(base >= 1);
  CHECK(base <= 6);
}

TEST_CASE("aha_segment: basal and mid sectors anchored at the anterior-septal junction") {
  const double ab_base = 0.9;
  const double ab_mid = 0.5;
  struct Row {
    double rt;
    int base_seg;
    int mid_seg;
  };
  // Sector centers: walls at their conventional rotational positions.
  const Row rows[] = {
      {0.70, 2, 8},          // anteroseptal (just past the anchor)
      {0.90, 3, 9},          // inferoseptal
      {1.0 / 12.0, 4, 10},   // inferior wall center
      {0.25, 5, 11},         // inferolateral
      {5.0 / 12.0, 6, 12},   // anterolateral
      {7.0 / 12.0, 1, 7},    // anterior wall center
  };
  for (const Row& r : rows) {
    CHECK(aha_segment(cc(0.5, ab_base, r.rt, 0)) == r.base_seg);
    CHECK(aha_segment(cc(0.5, ab_mid, r.rt, 0)) == r.mid_seg);
  }
}

TEST_CASE("aha_segment: four apical sectors") {
  const double ab = 0.2;
  CHECK(aha_segment(cc(0.5, ab, 0.75, 0)) == 14);         // septal
  CHECK(aha_segment(cc(0.5, ab, 1.0 / 12.0, 0)) == 15);   // inferior
  CHECK(aha_segment(cc(0.5, ab, 0.25, 0)) == 16);         // lateral
  CHECK(aha_segment(cc(0.5, ab, 7.0 / 12.0, 0)) == 13);   // anterior
}

TEST_CASE("aha_segment: septal RV-side points map like LV septum, free wall throws") {
  CHECK(aha_segment(cc(0.5, 0.9, 0.7, 1)) == 2);
  CHECK_THROWS_AS(aha_segment(cc(0.5, 0.9, 0.5, 1)), ValidationError);
  CHECK_THROWS_AS(aha_segment(cc(0.5, 0.9, 0.0, 1)), ValidationError);
  // Invalid coordinates are rejected before the region test.
  CHECK_THROWS_AS(aha_segment(cc(-0.5, 0.9, 0.1, 0)), ValidationError);
}

TEST_CASE("aha_segment partitions the LV region into ids 1..17") {
  int seen[18] = {0};
  for (int tv = 0; tv <= 1; ++tv) {
    for (int ia = 0; ia <= 40; ++ia) {
      for (int ir = 0; ir < 120; ++ir) {
        const CobivecoCoord c = cc(0.5, ia / 40.0, ir / 120.0, tv);
        if (!in_lv(c)) {
          CHECK_THROWS_AS(aha_segment(c), ValidationError);
          continue;
        }
        const int s = aha_segment(c);
        REQUIRE(s >= 1);
        REQUIRE(s <= 17);
        ++seen[s];
      }
    }
  }
  for (int s = 1; s <= 17; ++s) CHECK(seen[s] > 0);
}

TEST_CASE("aha_segment is piecewise constant away from sector boundaries") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto near_multiple = [](double v, double step) {
    const double r = std::fmod(v, step);
    return std::min(r, step - r) < 1e-6;
  };
  int tested = 0;
  for (int i = 0; i < 4000 && tested < 500; ++i) {
    const double ab = u(rng);
    const double rt = u(rng);
    // Stay away from ring edges and from every possible sector edge (the
    // 1/12 grid covers both the 6- and 4-sector divisions from anchor 2/3).
    if (std::abs(ab - 0.1) < 1e-3 || std::abs(ab - 1.0 / 3.0) < 1e-3 ||
        std::abs(ab - 2.0 / 3.0) < 1e-3)
      continue;
    if (near_multiple(fract(rt - 2.0 / 3.0), 1.0 / 12.0)) continue;
    const int s0 = aha_segment(cc(0.5, ab, rt, 0));
    const double lo = fract(rt - 1e-9);
    const double hi = fract(rt + 1e-9);
    CHECK(aha_segment(cc(0.5, ab, lo, 0)) == s0);
    CHECK(aha_segment(cc(0.5, ab, hi, 0)) == s0);
    ++tested;
  }
  CHECK(tested == 500);
}

TEST_CASE("aha_segment respects configurable thresholds") {
  AhaConfig cfg;
  cfg.anchor_rt = 0.0;
  // With the anchor rotated to rt=0, the first basal sector starts there.
  CHECK(aha_segment(cc(0.5, 0.9, 0.05, 0), cfg) == 2);
  CHECK(aha_segment(cc(0.5, 0.9, 0.95, 0), cfg) == 1);

  AhaConfig caps;
  caps.apex_cap_ab = 0.3;
  CHECK(aha_segment(cc(0.5, 0.25, 0.5, 0), caps) == 17);
}

}  // TEST_SUITE

#pragma once

#include "cardiotwin/types.hpp"

namespace cardiotwin {

// Normalized ventricular coordinates.
//   tm: transmural depth, 0 = endocardium .. 1 = epicardium
//   ab: apicobasal position, 0 = apex .. 1 = base
//   rt: rotational angle in [0,1), periodic; the septum occupies (2/3, 1)
//       on both sides, with rt = 2/3 at the anterior-septal junction and
//       rt = 0 at the posterior junction
//   tv: chamber, 0 = left ventricle (incl. septum), 1 = right ventricle
struct CobivecoCoord {
  double tm = 0.0;
  double ab = 0.0;
  double rt = 0.0;
  int tv = 0;
};

// Throws ValidationError when any component leaves its documented range.
void validate(const CobivecoCoord& c);

// LV region predicate: tv == 0, or an RV-side point rotationally past the
// septal threshold (rt > 2/3). The whole septum counts as LV.
bool in_lv(const CobivecoCoord& c);

// Signed minimal periodic difference b - a, in (-0.5, 0.5]. Ties at half a
// revolution resolve to +0.5.
double rt_delta(double a, double b);

// Distance used to snap target coordinates onto mesh nodes: Euclidean over
// (tm, ab) with periodic rt and a dominant chamber-mismatch term.
double coord_distance2(const CobivecoCoord& a, const CobivecoCoord& b);

// Ring boundaries (apicobasal) and the rotational anchor of the standard
// 17-segment division. Rings: base (mid_ab,1] -> 1..6, mid (apical_ab,mid_ab]
// -> 7..12, apical (apex_cap_ab,apical_ab] -> 13..16, apex cap -> 17.
// Sectors divide rt into 6 (base, mid) or 4 (apical) equal spans anchored at
// the anterior-septal junction.
struct AhaConfig {
  double apex_cap_ab = 0.1;
  double apical_ab = 1.0 / 3.0;
  double mid_ab = 2.0 / 3.0;
  double anchor_rt = 2.0 / 3.0;
};

// Maps an LV-region coordinate to its segment id in [1,17].
// Throws ValidationError for coordinates outside the LV region.
int aha_segment(const CobivecoCoord& c, const AhaConfig& cfg = {});

}  // namespace cardiotwin

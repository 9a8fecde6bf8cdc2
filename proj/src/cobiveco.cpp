#include "cardiotwin/cobiveco.hpp"

#include <cmath>
#include <string>

namespace cardiotwin {

void validate(const CobivecoCoord& c) {
  auto bad = [](const std::string& what, double v) {
    throw ValidationError("cobiveco " + what + " out of range: " + std::to_string(v));
  };
  if (!(c.tm >= 0.0 && c.tm <= 1.0)) bad("tm", c.tm);
  if (!(c.ab >= 0.0 && c.ab <= 1.0)) bad("ab", c.ab);
  if (!(c.rt >= 0.0 && c.rt < 1.0)) bad("rt", c.rt);
  if (c.tv != 0 && c.tv != 1) bad("tv", c.tv);
}

bool in_lv(const CobivecoCoord& c) {
  return c.tv == 0 || (c.tv == 1 && c.rt > 2.0 / 3.0);
}

double rt_delta(double a, double b) {
  double d = fract(b - a);
  if (d > 0.5) d -= 1.0;
  return d;
}

double coord_distance2(const CobivecoCoord& a, const CobivecoCoord& b) {
  const double dtm = a.tm - b.tm;
  const double dab = a.ab - b.ab;
  const double drt = rt_delta(a.rt, b.rt);
  const double dtv = static_cast<double>(a.tv - b.tv);
  // tv weight exceeds the largest possible in-chamber distance (1 + 1 + 0.25),
  // so the chamber always matches when a matching node exists.
  return dtm * dtm + dab * dab + drt * drt + 4.0 * dtv * dtv;
}

namespace {

// Sector index counted from the anchor in increasing rt, wrapped.
int sector_from_anchor(double rt, double anchor, int sectors) {
  const double u = fract(rt - anchor);
  int k = static_cast<int>(u * sectors);
  if (k >= sectors) k = sectors - 1;  // u just below 1.0
  return k;
}

}  // namespace

int aha_segment(const CobivecoCoord& c, const AhaConfig& cfg) {
  validate(c);
  if (!in_lv(c)) throw ValidationError("aha_segment: coordinate outside the LV region");

  if (c.ab <= cfg.apex_cap_ab) return 17;

  if (c.ab <= cfg.apical_ab) {
    // Four apical sectors from the anterior-septal anchor: septal, inferior,
    // lateral, anterior.
    static const int apical[4] = {14, 15, 16, 13};
    return apical[sector_from_anchor(c.rt, cfg.anchor_rt, 4)];
  }

  // Six sectors from the anchor: anteroseptal, inferoseptal, inferior,
  // inferolateral, anterolateral, anterior.
  static const int basal[6] = {2, 3, 4, 5, 6, 1};
  static const int mid[6] = {8, 9, 10, 11, 12, 7};
  const int k = sector_from_anchor(c.rt, cfg.anchor_rt, 6);
  return c.ab <= cfg.mid_ab ? mid[k] : basal[k];
}

}  // namespace cardiotwin

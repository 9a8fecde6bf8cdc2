#include "cardiotwin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cardiotwin {

void InfarctSpec::validate() const {
  cardiotwin::validate(center);
  if (!in_lv(center)) throw ValidationError("infarct center must lie in the LV region");
  if (r_tm < 0.0 || r_ab < 0.0 || r_rt < 0.0)
    throw ValidationError("infarct radii must be non-negative");
  if (bz_scale < 1.0) throw ValidationError("border-zone scale must be >= 1");
}

const char* to_string(TissueClass c) {
  switch (c) {
    case TissueClass::healthy: return "healthy";
    case TissueClass::bz: return "bz";
    case TissueClass::scar: return "scar";
  }
  return "healthy";
}

TissueClass tissue_class_from_string(const std::string& s) {
  if (s == "healthy") return TissueClass::healthy;
  if (s == "bz") return TissueClass::bz;
  if (s == "scar") return TissueClass::scar;
  throw FormatError("unknown tissue class '" + s + "'");
}

int TissueLabeling::count(TissueClass c) const {
  return static_cast<int>(std::count(node_class.begin(), node_class.end(), c));
}

std::vector<int> TissueLabeling::nodes_of(TissueClass c) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < node_class.size(); ++i)
    if (node_class[i] == c) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// One squared term of the ellipsoid sum; a zero radius admits only zero
// offset.
double ellipsoid_term(double d, double r) {
  if (d == 0.0) return 0.0;
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  const double q = d / r;
  return q * q;
}

double ellipsoid_value(const CobivecoCoord& c, const InfarctSpec& inf, double radius_scale) {
  return ellipsoid_term(c.tm - inf.center.tm, inf.r_tm * radius_scale) +
         ellipsoid_term(c.ab - inf.center.ab, inf.r_ab * radius_scale) +
         ellipsoid_term(rt_delta(inf.center.rt, c.rt), inf.r_rt * radius_scale);
}

}  // namespace

TissueLabeling label_tissue(const Mesh& mesh, const InfarctSpec& infarct) {
  infarct.validate();
  TissueLabeling lab;
  lab.node_class.assign(mesh.nodes.size(), TissueClass::healthy);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const CobivecoCoord& c = mesh.cobiveco[i];
    if (!in_lv(c)) continue;
    if (ellipsoid_value(c, infarct, 1.0) <= 1.0)
      lab.node_class[i] = TissueClass::scar;
    else if (ellipsoid_value(c, infarct, infarct.bz_scale) <= 1.0)
      lab.node_class[i] = TissueClass::bz;
  }
  return lab;
}

void CvConfig::validate() const {
  if (fiber <= 0.0 || sheet <= 0.0 || sheet_normal <= 0.0 || endo_dense <= 0.0 ||
      endo_sparse <= 0.0)
    throw ValidationError("conduction velocities must be positive");
  if (!(scar_fraction > 0.0 && scar_fraction <= bz_fraction && bz_fraction <= 1.0))
    throw ValidationError("require 0 < scar_fraction <= bz_fraction <= 1");
  if (endo_layer_tm < 0.0 || endo_layer_tm > 1.0)
    throw ValidationError("endocardial layer depth must lie in [0,1]");
}

std::vector<std::array<double, 3>> conduction_field(const Mesh& mesh,
                                                    const TissueLabeling& labeling,
                                                    const CvConfig& cv) {
  cv.validate();
  if (labeling.node_class.size() != mesh.nodes.size())
    throw ValidationError("conduction_field: labeling does not match mesh");

  std::vector<std::array<double, 3>> speeds(mesh.tets.size());
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    bool endo_layer = true, touches_endo = false, has_scar = false, has_bz = false;
    for (int v : t) {
      endo_layer = endo_layer && mesh.cobiveco[v].tm <= cv.endo_layer_tm;
      touches_endo = touches_endo || mesh.surface_tags[v] == SurfaceTag::lv_endo ||
                     mesh.surface_tags[v] == SurfaceTag::rv_endo;
      has_scar = has_scar || labeling.node_class[v] == TissueClass::scar;
      has_bz = has_bz || labeling.node_class[v] == TissueClass::bz;
    }
    std::array<double, 3> s = (endo_layer && touches_endo)
                                  ? std::array<double, 3>{cv.endo_dense, cv.sheet, cv.endo_sparse}
                                  : std::array<double, 3>{cv.fiber, cv.sheet, cv.sheet_normal};
    const double f = has_scar ? cv.scar_fraction : has_bz ? cv.bz_fraction : 1.0;
    speeds[e] = {s[0] * f, s[1] * f, s[2] * f};
  }
  return speeds;
}

std::vector<CatalogueLocation> default_catalogue_locations() {
  // Rotational anchors: septum center 5/6, anterior wall 7/12, lateral 1/3,
  // inferior 1/12. The apical entry spans all rotational sectors.
  return {
      {"septal", 0.50, 5.0 / 6.0, 0.30, 0.12},
      {"apical", 0.15, 0.50, 0.20, 0.50},
      {"extensive-anterior", 0.45, 7.0 / 12.0, 0.45, 0.18},
      {"limited-anterior", 0.40, 7.0 / 12.0, 0.15, 0.09},
      {"lateral-large", 0.50, 1.0 / 3.0, 0.35, 0.15},
      {"inferior", 0.50, 1.0 / 12.0, 0.30, 0.12},
      {"inferolateral", 0.50, 0.21, 0.35, 0.17},
      {"lateral-small", 0.50, 1.0 / 3.0, 0.175, 0.075},
  };
}

std::vector<ScenarioSpec> scenario_catalogue(const CvConfig& base, const CatalogueConfig& cfg) {
  base.validate();
  const std::vector<CatalogueLocation> locations =
      cfg.locations.empty() ? default_catalogue_locations() : cfg.locations;

  std::vector<ScenarioSpec> out;
  auto make_infarct = [&](const CatalogueLocation& loc, double r_tm) {
    InfarctSpec inf;
    inf.center = {0.0, loc.ab0, loc.rt0, 0};
    inf.r_tm = r_tm;
    inf.r_ab = loc.r_ab;
    inf.r_rt = loc.r_rt;
    inf.bz_scale = cfg.bz_scale;
    return inf;
  };
  for (const auto& loc : locations) {
    out.push_back({loc.name + "-transmural", make_infarct(loc, cfg.transmural_r_tm), base});
    out.push_back(
        {loc.name + "-subendocardial", make_infarct(loc, cfg.subendocardial_r_tm), base});
  }

  // The slowed-conduction variant of the transmural large-lateral infarct.
  const CatalogueLocation* lat = nullptr;
  for (const auto& loc : locations)
    if (loc.name == "lateral-large") lat = &loc;
  if (lat == nullptr) throw ValidationError("catalogue locations must include lateral-large");
  CvConfig slow = base;
  slow.scar_fraction = cfg.slow_scar_fraction;
  slow.bz_fraction = cfg.slow_bz_fraction;
  out.push_back(
      {"lateral-large-transmural-slowcv", make_infarct(*lat, cfg.transmural_r_tm), slow});
  return out;
}

const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& catalogue,
                                  const std::string& name) {
  for (const auto& s : catalogue)
    if (s.name == name) return s;
  std::string msg = "unknown scenario '" + name + "'; valid names:";
  for (const auto& s : catalogue) msg += " " + s.name;
  throw ValidationError(msg);
}

}  // namespace cardiotwin

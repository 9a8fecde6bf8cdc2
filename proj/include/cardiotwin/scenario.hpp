#pragma once

#include <array>
#include <string>
#include <vector>

#include "cardiotwin/geometry.hpp"

namespace cardiotwin {

// Ellipsoidal infarct region in normalized ventricular coordinates. A node
// belongs to the scar core when
//   (dtm/r_tm)^2 + (dab/r_ab)^2 + (drt/r_rt)^2 <= 1
// with drt the minimal periodic rotational difference, and to the border zone
// when the same holds after scaling every radius by bz_scale. Restricted to
// the LV region.
struct InfarctSpec {
  CobivecoCoord center;  // tm0, ab0, rt0, tv (LV side)
  double r_tm = 0.0;
  double r_ab = 0.0;
  double r_rt = 0.0;
  double bz_scale = 1.5;  // border-zone radius multiplier >= 1

  void validate() const;  // throws ValidationError
};

enum class TissueClass : std::uint8_t { healthy = 0, scar = 1, bz = 2 };

const char* to_string(TissueClass c);
TissueClass tissue_class_from_string(const std::string& s);  // throws FormatError

struct TissueLabeling {
  std::vector<TissueClass> node_class;

  int count(TissueClass c) const;
  std::vector<int> nodes_of(TissueClass c) const;
};

TissueLabeling label_tissue(const Mesh& mesh, const InfarctSpec& infarct);

// Conduction velocities in cm/s and the slow-down fractions applied inside
// the infarct. Tangential endocardial speeds are raised to the fast dense /
// sparse values inside the thin subendocardial layer.
struct CvConfig {
  double fiber = 65.0;
  double sheet = 48.0;         // transmural
  double sheet_normal = 51.0;
  double endo_dense = 150.0;   // replaces fiber speed in the endocardial layer
  double endo_sparse = 100.0;  // replaces sheet-normal speed there
  double scar_fraction = 0.10;
  double bz_fraction = 0.50;
  double endo_layer_tm = 0.05;  // layer: all element nodes at tm <= this, touching endocardium

  void validate() const;  // throws ValidationError
};

// Per-element (fiber, sheet, sheet-normal) speeds in cm/s. An element is
// scar-slowed when any of its nodes is scar, border-zone-slowed when any node
// is bz, healthy otherwise.
std::vector<std::array<double, 3>> conduction_field(const Mesh& mesh,
                                                    const TissueLabeling& labeling,
                                                    const CvConfig& cv);

struct ScenarioSpec {
  std::string name;
  InfarctSpec infarct;
  CvConfig cv;
};

// One anatomical location of the simulated-infarct catalogue, named after the
// wall it occupies. Center depth tm0 = 0 throughout; extent is set per entry.
struct CatalogueLocation {
  std::string name;
  double ab0, rt0, r_ab, r_rt;
};

struct CatalogueConfig {
  double transmural_r_tm = 3.0;
  double subendocardial_r_tm = 0.5;
  double bz_scale = 1.5;
  double slow_scar_fraction = 0.05;
  double slow_bz_fraction = 0.25;
  std::vector<CatalogueLocation> locations;  // empty -> built-in defaults
};

std::vector<CatalogueLocation> default_catalogue_locations();

// The 17-entry scenario catalogue: every location in transmural and
// subendocardial extent, plus one transmural large-lateral entry with slowed
// conduction. The slow-CV entry is always last, so the first 16 entries form
// the inverse-stage candidate set.
std::vector<ScenarioSpec> scenario_catalogue(const CvConfig& base,
                                             const CatalogueConfig& cfg = {});

// Lookup by scenario name; throws ValidationError listing valid names.
const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& catalogue,
                                  const std::string& name);

}  // namespace cardiotwin

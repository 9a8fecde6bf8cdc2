#pragma once

#include <string>

#include "cardiotwin/eikonal.hpp"
#include "cardiotwin/geometry.hpp"
#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/qrs_analysis.hpp"
#include "cardiotwin/scenario.hpp"

namespace cardiotwin {

// Native mesh file: sectioned plain text with one record per line.
//   nodes N         / x y z               (mm)
//   tets M          / a b c d             (zero-based node indices)
//   frames M        / fx fy fz sx sy sz nx ny nz
//   cobiveco N      / tm ab rt tv
//   surface_tags N  / none|lv_endo|rv_endo|epi
// Blank lines and lines starting with '#' are ignored. Values are written
// with 17 significant digits so save/load round-trips exactly.
void save_mesh(const Mesh& mesh, const std::string& path);

// Loads the native format, or a legacy ASCII VTK unstructured grid
// (tetrahedra only) whose POINT_DATA carries scalar arrays tm, ab, rt, tv
// and optionally surface_tag (codes 0 none, 1 lv_endo, 2 rv_endo, 3 epi).
// Legacy files without frames get the global basis triad per element.
// The loaded mesh is validated before being returned.
Mesh load_mesh(const std::string& path);

void save_activation_csv(const ActivationMap& atm, const std::string& path,
                         const std::string& config_hash);
void save_labeling_csv(const TissueLabeling& labeling, const std::string& path,
                       const std::string& config_hash);
TissueLabeling load_labeling_csv(const std::string& path);

void save_ecg_csv(const EcgRecord& rec, const std::string& path, const std::string& config_hash);
EcgRecord load_ecg_csv(const std::string& path);

void save_dtw_csv(const DtwTable& table, const std::string& path,
                  const std::string& config_hash);
DtwTable load_dtw_csv(const std::string& path);

// First `# config_hash=` comment in the file; empty string when absent.
std::string read_config_hash(const std::string& path);

}  // namespace cardiotwin

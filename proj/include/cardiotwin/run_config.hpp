#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardiotwin/cobiveco.hpp"
#include "cardiotwin/eikonal.hpp"
#include "cardiotwin/geometry.hpp"
#include "cardiotwin/inverse.hpp"
#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/scenario.hpp"

namespace cardiotwin {

// Everything one experiment needs. Every field carries the engine default,
// so an empty JSON object reproduces the reference setup and any subset of
// keys overrides just those values. Unknown keys are rejected.
struct RunConfig {
  std::string mesh_path;  // empty: build the phantom below
  PhantomSpec phantom;
  CvConfig cv;
  CatalogueConfig catalogue;
  EcgConfig ecg;
  AhaConfig aha;
  InverseConfig inverse;
  std::vector<RootTarget> root_targets;  // empty: built-in defaults
  ElectrodeSet electrodes;               // empty: derived from the mesh
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;  // throws ValidationError
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical serialization of the effective config: defaults expanded, keys
// sorted. Two configs are interchangeable iff these strings are equal.
std::string run_config_to_json(const RunConfig& cfg);

// FNV-1a 64 of the canonical serialization, as 16 hex digits. Embedded in
// every output file so mixed-config artifacts are detectable.
std::string config_hash(const RunConfig& cfg);

}  // namespace cardiotwin

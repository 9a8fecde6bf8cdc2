#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cardiotwin/eikonal.hpp"
#include "cardiotwin/geometry.hpp"

namespace cardiotwin {

// Depolarization-only transmembrane template and extracellular sampling
// parameters. The lumped conductivity factor scales every potential equally
// and cancels under max-abs normalization.
struct EcgConfig {
  double dt_ms = 0.5;
  double upstroke_ms = 2.0;
  double vm_rest_mv = -85.0;
  double vm_plateau_mv = 25.0;
  double lump_factor = 1.0;  // a^2 sigma_i / (4 sigma_e)
  int l_qrs = 512;
  double onset_fraction = 0.02;  // crop threshold relative to the global max

  void validate() const;  // throws ValidationError
};

// Piecewise-linear depolarization: rest before the local activation time,
// linear upstroke, plateau afterwards.
double transmembrane_value(double activation_ms, double t_ms, const EcgConfig& cfg);

std::vector<double> transmembrane_trace(const ActivationMap& atm, double t_ms,
                                        const EcgConfig& cfg);

// The ten standard electrodes by name. Positions in mm, mesh frame.
struct ElectrodeSet {
  std::vector<std::string> names;
  std::vector<Vec3> positions;
};

extern const std::array<const char*, 10> kStandardElectrodes;  // LA RA LL RL V1..V6

// Electrodes on a virtual torso cylinder with three times the lateral extent
// of the mesh bounding box, limb electrodes beyond the long-axis ends.
// Deterministic and translation-equivariant.
ElectrodeSet default_electrodes(const Mesh& mesh);

// Raw extracellular potentials phi_e(t) at arbitrary electrode positions:
// per element, the lifted-dipole contribution grad(Vm) . (c - x_e) / r^3
// times element volume, with r from element centroid c to the electrode.
// Throws ValidationError when an electrode is closer to a centroid than one
// mean edge length (inside or touching the tissue).
struct PotentialTraces {
  double t0_ms = 0.0;
  double dt_ms = 0.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  // [electrode][sample]
};
PotentialTraces electrode_potentials(const Mesh& mesh, const ActivationMap& atm,
                                     const ElectrodeSet& electrodes, const EcgConfig& cfg);

// Cropped, resampled, max-abs-normalized 8-lead QRS complex.
struct EcgRecord {
  static const std::array<const char*, 8> lead_names;  // I II V1..V6

  std::array<std::vector<double>, 8> leads;
  double dt_effective_ms = 0.0;
  int qrs_onset = 0;   // sample index
  int qrs_offset = 0;  // sample index
  std::string scenario;

  int length() const { return static_cast<int>(leads[0].size()); }
};

// Standard lead derivation from named electrode potentials: I = LA - RA,
// II = LL - RA, Vi' = Vi - (LA + RA + LL)/3. Requires all ten standard names
// with equal-length series.
std::array<std::vector<double>, 8> derive_leads(
    const std::map<std::string, std::vector<double>>& potentials);

// Full forward synthesis: potentials, lead derivation, crop at the onset
// fraction of the global max, linear resample to l_qrs samples, max-abs
// normalization (skipped for an identically zero record).
EcgRecord simulate_qrs(const Mesh& mesh, const ActivationMap& atm,
                       const ElectrodeSet& electrodes, const EcgConfig& cfg);

}  // namespace cardiotwin

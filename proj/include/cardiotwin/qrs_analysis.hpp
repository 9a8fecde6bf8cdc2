#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/scenario.hpp"

namespace cardiotwin {

// Path-length-normalized dynamic time warping with absolute-difference ground
// cost and full warping window, plus a relative duration penalty:
//   cost(path) / (len(a) + len(b)) + gamma * |dur_a - dur_b| / max(dur_a, dur_b).
// The penalty vanishes when both durations are equal (or both unset at 0).
double dtw_distance(const std::vector<double>& a, const std::vector<double>& b,
                    double dur_a_ms = 0.0, double dur_b_ms = 0.0, double gamma = 1.0);

// Marker-based duration; throws ValidationError for an identically zero
// record, whose markers carry no information.
double qrs_duration_ms(const EcgRecord& rec);

struct AbnormalityThresholds {
  double prolong_ratio = 1.2;     // vs baseline duration
  double prolong_abs_ms = 120.0;  // absolute duration bound
  double q_width_ms = 40.0;
  double q_depth_frac = 0.25;     // of the same lead's R amplitude
  double fqrs_swing_frac = 0.05;  // of the lead's max-abs amplitude
  int fqrs_max_reversals = 2;
  double deflection_frac = 0.02;  // wave-detection threshold
};

struct AbnormalityFlags {
  bool prolonged = false;
  bool poor_r_progression = false;
  std::array<bool, 8> pathological_q{};
  std::array<bool, 8> fragmented{};

  bool any() const;
};

// Rule-based QRS abnormality detectors: duration prolongation (relative to
// baseline or absolute), pathological Q waves (wide or deep initial negative
// deflection), poor R-wave progression across V1..V4 or R(V6) > R(V5), and
// fragmentation (more than the allowed number of large directional
// reversals).
AbnormalityFlags detect_abnormalities(const EcgRecord& rec, const EcgRecord& baseline,
                                      const AbnormalityThresholds& thr = {});

struct DtwTable {
  std::vector<std::string> scenario;
  std::vector<std::array<double, 8>> lead_dtw;
  std::vector<double> dtw_max;
  std::vector<double> dtw_avg;
  std::vector<std::array<bool, 8>> representative;  // leads with above-median DTW
  std::vector<double> duration_ms;
  double baseline_duration_ms = 0.0;

  int rows() const { return static_cast<int>(scenario.size()); }
};

// One forward pass: infarct labeling (none for baseline), conduction field,
// activation solve, QRS synthesis.
struct ForwardResult {
  TissueLabeling labeling;
  ActivationMap atm;
  EcgRecord record;
};
ForwardResult forward_simulate(const Mesh& mesh, const InfarctSpec* infarct, const CvConfig& cv,
                               const RootNodes& roots, const ElectrodeSet& electrodes,
                               const EcgConfig& ecfg, const std::string& scenario_name);

// Per-(scenario, lead) DTW of every catalogue entry against the healthy
// baseline, with summary columns and representative-lead flags.
DtwTable sensitivity_sweep(const Mesh& mesh, const std::vector<ScenarioSpec>& catalogue,
                           const CvConfig& baseline_cv, const RootNodes& roots,
                           const ElectrodeSet& electrodes, const EcgConfig& ecfg,
                           double gamma = 1.0, int jobs = 1);

}  // namespace cardiotwin

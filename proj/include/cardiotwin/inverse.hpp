#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cardiotwin/eikonal.hpp"
#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/qrs_analysis.hpp"
#include "cardiotwin/scenario.hpp"

namespace cardiotwin {

// Two-stage infarct recovery: a grid stage over a named candidate set, then
// a Nelder-Mead refinement over (ab0, rt0, r_tm, r_ab, r_rt) started from
// the grid winner. rt0 is treated periodically, radii are clamped to >= 0,
// and tm0 / tv stay fixed at the candidate values.
struct InverseConfig {
  int budget = 200;  // max refinement-stage forward solves
  std::array<double, 5> simplex_steps{0.1, 0.1, 0.5, 0.1, 0.05};
  double tol = 1e-6;  // objective spread below which the simplex has converged
  std::uint64_t seed = 0;
  int jobs = 1;  // grid-stage parallelism

  void validate() const;  // throws ValidationError
};

struct InverseResult {
  InfarctSpec best;
  TissueLabeling labeling;
  double objective = 0.0;
  int forward_solves = 0;  // exact: grid evaluations + refinement solves
  std::string stage1_name;
  double stage1_objective = 0.0;
};

// Mean over the eight leads of the duration-penalized DTW between an
// observed and a simulated record.
double inverse_objective(const EcgRecord& observed, const EcgRecord& simulated);

// Simulates theta on the mesh and scores it against the observed record.
double inverse_objective(const InfarctSpec& theta, const EcgRecord& observed, const Mesh& mesh,
                         const CvConfig& cv, const RootNodes& roots,
                         const ElectrodeSet& electrodes, const EcgConfig& ecfg);

// Candidates that fail to simulate are skipped; only when every candidate
// fails is the failure raised. budget 0 returns the grid winner verbatim.
InverseResult invert(const EcgRecord& observed, const Mesh& mesh,
                     const std::vector<ScenarioSpec>& candidates, const RootNodes& roots,
                     const ElectrodeSet& electrodes, const EcgConfig& ecfg,
                     const InverseConfig& icfg = {});

}  // namespace cardiotwin

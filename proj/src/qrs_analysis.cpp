#include "cardiotwin/qrs_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cardiotwin/parallel.hpp"

namespace cardiotwin {

double dtw_distance(const std::vector<double>& a, const std::vector<double>& b, double dur_a_ms,
                    double dur_b_ms, double gamma) {
  if (a.empty() || b.empty()) throw ValidationError("dtw_distance: empty series");
  if (dur_a_ms < 0.0 || dur_b_ms < 0.0)
    throw ValidationError("dtw_distance: negative duration");

  const std::size_t na = a.size(), nb = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(nb + 1, inf), cur(nb + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= na; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= nb; ++j) {
      const double c = std::abs(a[i - 1] - b[j - 1]);
      cur[j] = c + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  const double normalized = prev[nb] / static_cast<double>(na + nb);

  const double dmax = std::max(dur_a_ms, dur_b_ms);
  const double penalty = dmax > 0.0 ? gamma * std::abs(dur_a_ms - dur_b_ms) / dmax : 0.0;
  return normalized + penalty;
}

namespace {

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double record_max_abs(const EcgRecord& rec) {
  double m = 0.0;
  for (const auto& lead : rec.leads) m = std::max(m, max_abs(lead));
  return m;
}

double r_amplitude(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, v);
  return m;
}

}  // namespace

double qrs_duration_ms(const EcgRecord& rec) {
  if (rec.length() == 0) throw ValidationError("qrs_duration: empty record");
  if (rec.qrs_offset < rec.qrs_onset || rec.qrs_offset >= rec.length())
    throw ValidationError("qrs_duration: inconsistent markers");
  if (record_max_abs(rec) == 0.0)
    throw ValidationError("qrs_duration: record is identically zero");
  return (rec.qrs_offset - rec.qrs_onset) * rec.dt_effective_ms;
}

bool AbnormalityFlags::any() const {
  if (prolonged || poor_r_progression) return true;
  for (bool b : pathological_q)
    if (b) return true;
  for (bool b : fragmented)
    if (b) return true;
  return false;
}

AbnormalityFlags detect_abnormalities(const EcgRecord& rec, const EcgRecord& baseline,
                                      const AbnormalityThresholds& thr) {
  AbnormalityFlags flags;
  const double dur = qrs_duration_ms(rec);
  const double dur_base = qrs_duration_ms(baseline);
  flags.prolonged = dur > thr.prolong_ratio * dur_base || dur > thr.prolong_abs_ms;

  for (int l = 0; l < 8; ++l) {
    const auto& x = rec.leads[l];
    const double amp = max_abs(x);
    if (amp == 0.0) continue;
    const double detect = thr.deflection_frac * amp;

    // Pathological Q: the first deflection is negative and either wide or
    // deep relative to the lead's R amplitude. A QS complex (no positive
    // wave at all) counts as pathological.
    int i = rec.qrs_onset;
    while (i <= rec.qrs_offset && std::abs(x[i]) < detect) ++i;
    if (i <= rec.qrs_offset && x[i] < 0.0) {
      int j = i;
      double depth = 0.0;
      while (j <= rec.qrs_offset && x[j] < 0.0) {
        depth = std::max(depth, -x[j]);
        ++j;
      }
      const double width_ms = (j - i) * rec.dt_effective_ms;
      const double r_amp = r_amplitude(x);
      flags.pathological_q[l] = width_ms > thr.q_width_ms || depth > thr.q_depth_frac * r_amp;
    }

    // Fragmentation: count directional reversals whose swing exceeds the
    // threshold; the initial direction is not a reversal.
    const double swing = thr.fqrs_swing_frac * amp;
    int reversals = 0, dir = 0;
    double extreme = x[rec.qrs_onset];
    for (int s = rec.qrs_onset + 1; s <= rec.qrs_offset; ++s) {
      const double d = x[s] - extreme;
      if (dir == 0) {
        if (std::abs(d) >= swing) dir = d > 0.0 ? 1 : -1;
        extreme = dir == 0 ? extreme : x[s];
      } else if ((dir > 0 && x[s] > extreme) || (dir < 0 && x[s] < extreme)) {
        extreme = x[s];
      } else if (std::abs(d) >= swing) {
        ++reversals;
        dir = -dir;
        extreme = x[s];
      }
    }
    flags.fragmented[l] = reversals > thr.fqrs_max_reversals;
  }

  // Poor R-wave progression over the precordial leads (record order: I, II,
  // V1..V6 -> V1 is index 2).
  std::array<double, 6> r{};
  for (int v = 0; v < 6; ++v) r[v] = r_amplitude(rec.leads[2 + v]);
  for (int v = 0; v < 3; ++v)
    if (r[v + 1] < r[v]) flags.poor_r_progression = true;
  if (r[5] > r[4]) flags.poor_r_progression = true;

  return flags;
}

ForwardResult forward_simulate(const Mesh& mesh, const InfarctSpec* infarct, const CvConfig& cv,
                               const RootNodes& roots, const ElectrodeSet& electrodes,
                               const EcgConfig& ecfg, const std::string& scenario_name) {
  ForwardResult out;
  if (infarct != nullptr) {
    out.labeling = label_tissue(mesh, *infarct);
  } else {
    out.labeling.node_class.assign(mesh.nodes.size(), TissueClass::healthy);
  }
  const auto speeds = conduction_field(mesh, out.labeling, cv);
  out.atm = solve_activation(mesh, speeds, roots);
  out.record = simulate_qrs(mesh, out.atm, electrodes, ecfg);
  out.record.scenario = scenario_name;
  return out;
}

DtwTable sensitivity_sweep(const Mesh& mesh, const std::vector<ScenarioSpec>& catalogue,
                           const CvConfig& baseline_cv, const RootNodes& roots,
                           const ElectrodeSet& electrodes, const EcgConfig& ecfg, double gamma,
                           int jobs) {
  const ForwardResult baseline =
      forward_simulate(mesh, nullptr, baseline_cv, roots, electrodes, ecfg, "baseline");
  const double dur_base = qrs_duration_ms(baseline.record);

  const int n = static_cast<int>(catalogue.size());
  DtwTable table;
  table.scenario.resize(n);
  table.lead_dtw.resize(n);
  table.dtw_max.resize(n);
  table.dtw_avg.resize(n);
  table.representative.resize(n);
  table.duration_ms.resize(n);
  table.baseline_duration_ms = dur_base;

  parallel_for(n, jobs, [&](int i) {
    const ScenarioSpec& sc = catalogue[i];
    const ForwardResult fr =
        forward_simulate(mesh, &sc.infarct, sc.cv, roots, electrodes, ecfg, sc.name);
    const double dur = qrs_duration_ms(fr.record);
    table.scenario[i] = sc.name;
    table.duration_ms[i] = dur;
    double sum = 0.0, mx = 0.0;
    for (int l = 0; l < 8; ++l) {
      const double d =
          dtw_distance(fr.record.leads[l], baseline.record.leads[l], dur, dur_base, gamma);
      table.lead_dtw[i][l] = d;
      sum += d;
      mx = std::max(mx, d);
    }
    table.dtw_max[i] = mx;
    table.dtw_avg[i] = sum / 8.0;

    std::array<double, 8> sorted = table.lead_dtw[i];
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[3] + sorted[4]);
    for (int l = 0; l < 8; ++l) table.representative[i][l] = table.lead_dtw[i][l] > median;
  });
  return table;
}

}  // namespace cardiotwin

#include "cardiotwin/pseudo_ecg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cardiotwin {

const std::array<const char*, 10> kStandardElectrodes = {"LA", "RA", "LL", "RL", "V1",
                                                         "V2", "V3", "V4", "V5", "V6"};
const std::array<const char*, 8> EcgRecord::lead_names = {"I",  "II", "V1", "V2",
                                                          "V3", "V4", "V5", "V6"};

void EcgConfig::validate() const {
  if (dt_ms <= 0.0) throw ValidationError("ecg: dt must be positive");
  if (upstroke_ms <= 0.0) throw ValidationError("ecg: upstroke duration must be positive");
  if (vm_plateau_mv <= vm_rest_mv) throw ValidationError("ecg: plateau must exceed rest");
  if (l_qrs < 2) throw ValidationError("ecg: resampled length must be at least 2");
  if (onset_fraction <= 0.0 || onset_fraction >= 1.0)
    throw ValidationError("ecg: onset fraction must lie in (0,1)");
}

double transmembrane_value(double activation_ms, double t_ms, const EcgConfig& cfg) {
  if (!(activation_ms < std::numeric_limits<double>::infinity())) return cfg.vm_rest_mv;
  const double u = (t_ms - activation_ms) / cfg.upstroke_ms;
  if (u <= 0.0) return cfg.vm_rest_mv;
  if (u >= 1.0) return cfg.vm_plateau_mv;
  return cfg.vm_rest_mv + (cfg.vm_plateau_mv - cfg.vm_rest_mv) * u;
}

std::vector<double> transmembrane_trace(const ActivationMap& atm, double t_ms,
                                        const EcgConfig& cfg) {
  std::vector<double> vm(atm.t_ms.size());
  for (std::size_t i = 0; i < vm.size(); ++i) vm[i] = transmembrane_value(atm.t_ms[i], t_ms, cfg);
  return vm;
}

ElectrodeSet default_electrodes(const Mesh& mesh) {
  const BoundingBox bb = bounding_box(mesh.nodes);
  const Vec3 c = bb.center();
  const Vec3 ext = bb.extent();
  // Torso cylinder: diameter three times the larger lateral extent.
  const double radius = 1.5 * std::max(ext.x, ext.y);
  const double zmid = c.z;
  const double ztop = bb.hi.z + 0.4 * ext.z;
  const double zbot = bb.lo.z - 0.4 * ext.z;

  // Azimuth from +x (patient right), counterclockwise; +y is anterior.
  struct Station {
    const char* name;
    double deg;
    double z;
  };
  const Station stations[10] = {
      {"LA", 170.0, ztop}, {"RA", 10.0, ztop},  {"LL", 160.0, zbot},
      {"RL", 20.0, zbot},  {"V1", 75.0, zmid},  {"V2", 95.0, zmid},
      {"V3", 110.0, zmid}, {"V4", 125.0, zmid}, {"V5", 145.0, zmid},
      {"V6", 165.0, zmid},
  };
  ElectrodeSet set;
  for (const auto& s : stations) {
    const double a = s.deg * kPi / 180.0;
    set.names.push_back(s.name);
    set.positions.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a), s.z});
  }
  return set;
}

PotentialTraces electrode_potentials(const Mesh& mesh, const ActivationMap& atm,
                                     const ElectrodeSet& electrodes, const EcgConfig& cfg) {
  cfg.validate();
  if (electrodes.names.size() != electrodes.positions.size() || electrodes.names.empty())
    throw ValidationError("electrode_potentials: malformed electrode set");
  if (atm.t_ms.size() != mesh.nodes.size())
    throw ValidationError("electrode_potentials: activation map does not match mesh");

  const int ne = mesh.elem_count();
  const int nn = mesh.node_count();
  const int nel = static_cast<int>(electrodes.names.size());
  const double edge_floor = mean_edge_length(mesh);

  // Collapse the per-element piecewise-linear gradient against the lead
  // field: phi_e(t) = sum_i Vm_i(t) * K_e(i), where K_e(i) accumulates
  // grad(N_i) . (c - x_e) vol / r^3 over the elements incident to node i.
  // sum_i grad(N_i) = 0 inside every element, so any constant added to Vm
  // drops out of the integral.
  std::vector<std::vector<double>> coeff(nel, std::vector<double>(nn, 0.0));
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.tets[e];
    const Vec3& a = mesh.nodes[t[0]];
    const Vec3 u = mesh.nodes[t[1]] - a;
    const Vec3 v = mesh.nodes[t[2]] - a;
    const Vec3 w = mesh.nodes[t[3]] - a;
    const double det = dot(u, cross(v, w));
    if (det == 0.0) throw NumericError("electrode_potentials: degenerate element");
    const double vol = det / 6.0;
    // Rows of the inverse edge matrix: shape-function gradients.
    const Vec3 g1 = cross(v, w) / det;
    const Vec3 g2 = cross(w, u) / det;
    const Vec3 g3 = cross(u, v) / det;
    const Vec3 g0 = (g1 + g2 + g3) * -1.0;
    const Vec3 grads[4] = {g0, g1, g2, g3};
    const Vec3 centroid = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]] +
                           mesh.nodes[t[3]]) * 0.25;
    for (int el = 0; el < nel; ++el) {
      const Vec3 d = centroid - electrodes.positions[el];
      const double r = norm(d);
      if (r < edge_floor)
        throw ValidationError("electrode '" + electrodes.names[el] +
                              "' lies inside or touches the myocardium");
      const Vec3 lead = d * (vol / (r * r * r));
      for (int i = 0; i < 4; ++i) coeff[el][t[i]] += dot(grads[i], lead);
    }
  }

  if (atm.unreachable_count() == static_cast<int>(atm.t_ms.size()))
    throw ValidationError("electrode_potentials: no activated nodes");
  // Anchoring the grid at the earliest activation makes the sampled series
  // invariant under a constant shift of the activation map.
  double t0 = std::numeric_limits<double>::infinity();
  for (double t : atm.t_ms) t0 = std::min(t0, t);
  const double t_end = atm.max_finite() + cfg.upstroke_ms + cfg.dt_ms;
  const int steps = static_cast<int>(std::ceil((t_end - t0) / cfg.dt_ms)) + 1;

  PotentialTraces out;
  out.t0_ms = t0;
  out.dt_ms = cfg.dt_ms;
  out.names = electrodes.names;
  out.series.assign(nel, std::vector<double>(steps, 0.0));
  std::vector<double> vm(nn);
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * cfg.dt_ms;
    // Subtracting the earliest node's Vm leaves the integral unchanged
    // (a constant meets sum grad(N_i) = 0) but cancels exactly in floating
    // point when the map is uniform, keeping the null case identically zero.
    const double vm_ref = transmembrane_value(t0, t, cfg);
    for (int i = 0; i < nn; ++i) vm[i] = transmembrane_value(atm.t_ms[i], t, cfg) - vm_ref;
    for (int el = 0; el < nel; ++el) {
      const std::vector<double>& k = coeff[el];
      double acc = 0.0;
      for (int i = 0; i < nn; ++i) acc += vm[i] * k[i];
      out.series[el][s] = cfg.lump_factor * acc;
    }
  }
  return out;
}

std::array<std::vector<double>, 8> derive_leads(
    const std::map<std::string, std::vector<double>>& potentials) {
  for (const char* name : kStandardElectrodes)
    if (potentials.find(name) == potentials.end())
      throw ValidationError(std::string("derive_leads: missing electrode '") + name + "'");
  const std::size_t len = potentials.at("LA").size();
  for (const auto& [name, series] : potentials)
    if (series.size() != len)
      throw ValidationError("derive_leads: electrode series lengths differ");

  const auto& la = potentials.at("LA");
  const auto& ra = potentials.at("RA");
  const auto& ll = potentials.at("LL");
  std::array<std::vector<double>, 8> leads;
  for (auto& l : leads) l.resize(len);
  for (std::size_t s = 0; s < len; ++s) {
    const double wct = (la[s] + ra[s] + ll[s]) / 3.0;
    leads[0][s] = la[s] - ra[s];
    leads[1][s] = ll[s] - ra[s];
    for (int v = 0; v < 6; ++v)
      leads[2 + v][s] = potentials.at(std::string("V") + std::to_string(v + 1))[s] - wct;
  }
  return leads;
}

EcgRecord simulate_qrs(const Mesh& mesh, const ActivationMap& atm, const ElectrodeSet& electrodes,
                       const EcgConfig& cfg) {
  const PotentialTraces pot = electrode_potentials(mesh, atm, electrodes, cfg);
  std::map<std::string, std::vector<double>> by_name;
  for (std::size_t i = 0; i < pot.names.size(); ++i) by_name[pot.names[i]] = pot.series[i];
  const auto raw = derive_leads(by_name);
  const int raw_len = static_cast<int>(raw[0].size());

  double global_max = 0.0;
  for (const auto& lead : raw)
    for (double v : lead) global_max = std::max(global_max, std::abs(v));

  EcgRecord rec;
  rec.dt_effective_ms = cfg.dt_ms * (raw_len - 1) / static_cast<double>(cfg.l_qrs - 1);
  rec.qrs_onset = 0;
  rec.qrs_offset = cfg.l_qrs - 1;

  int lo = 0, hi = raw_len - 1;
  if (global_max > 0.0) {
    const double thr = cfg.onset_fraction * global_max;
    auto above = [&](int s) {
      for (const auto& lead : raw)
        if (std::abs(lead[s]) >= thr) return true;
      return false;
    };
    while (lo < raw_len && !above(lo)) ++lo;
    while (hi > lo && !above(hi)) --hi;
    if (hi == lo) hi = std::min(lo + 1, raw_len - 1);  // degenerate spike
    rec.dt_effective_ms = cfg.dt_ms * (hi - lo) / static_cast<double>(cfg.l_qrs - 1);
  }

  // Linear resample of the cropped window onto l_qrs samples.
  for (int l = 0; l < 8; ++l) {
    rec.leads[l].resize(cfg.l_qrs);
    for (int s = 0; s < cfg.l_qrs; ++s) {
      const double x = lo + (hi - lo) * (static_cast<double>(s) / (cfg.l_qrs - 1));
      const int i0 = std::min(static_cast<int>(x), raw_len - 1);
      const int i1 = std::min(i0 + 1, raw_len - 1);
      const double f = x - i0;
      rec.leads[l][s] = raw[l][i0] * (1.0 - f) + raw[l][i1] * f;
    }
  }

  double m = 0.0;
  for (const auto& lead : rec.leads)
    for (double v : lead) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (auto& lead : rec.leads)
      for (double& v : lead) v /= m;
  return rec;
}

}  // namespace cardiotwin

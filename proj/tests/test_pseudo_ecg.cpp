#include "doctest.h"

#include "cardiotwin/pseudo_ecg.hpp"

#include <cmath>
#include <map>

using namespace cardiotwin;

namespace {

ActivationMap constant_map(int n, double t) {
  ActivationMap atm;
  atm.t_ms.assign(n, t);
  return atm;
}

std::map<std::string, std::vector<double>> zero_potentials(std::size_t len) {
  std::map<std::string, std::vector<double>> p;
  for (const char* name : kStandardElectrodes) p[name] = std::vector<double>(len, 0.0);
  return p;
}

int slab_node_at(const Mesh& m, const Vec3& p) {
  for (int i = 0; i < m.node_count(); ++i)
    if (norm(m.nodes[i] - p) < 1e-9) return i;
  REQUIRE(false);
  return -1;
}

// Single-root activation on the default slab, wave along +x or -x.
ActivationMap slab_wave(const Mesh& slab, bool forward) {
  const int root = slab_node_at(slab, forward ? Vec3{0, 0, 0} : Vec3{60, 0, 0});
  RootNodes roots;
  roots.entries.push_back({root, 0.0});
  return solve_activation(
      slab, std::vector<std::array<double, 3>>(slab.elem_count(), {65.0, 65.0, 65.0}), roots);
}

}  // namespace

TEST_SUITE("pseudo_ecg") {

TEST_CASE("EcgConfig validation") {
  CHECK_NOTHROW(EcgConfig{}.validate());
  EcgConfig c;
  c.dt_ms = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = EcgConfig{};
  c.upstroke_ms = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = EcgConfig{};
  c.l_qrs = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = EcgConfig{};
  c.onset_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("transmembrane template: rest, linear upstroke, plateau") {
  EcgConfig cfg;
  CHECK(transmembrane_value(10.0, 9.9, cfg) == -85.0);
  CHECK(transmembrane_value(10.0, 10.0, cfg) == -85.0);
  CHECK(transmembrane_value(10.0, 11.0, cfg) == doctest::Approx(-30.0).epsilon(1e-12));
  CHECK(transmembrane_value(10.0, 12.0, cfg) == 25.0);
  CHECK(transmembrane_value(10.0, 500.0, cfg) == 25.0);
  // Quarter point of the 2 ms upstroke.
  CHECK(transmembrane_value(10.0, 10.5, cfg) == doctest::Approx(-57.5).epsilon(1e-12));
  // Unreachable nodes stay at rest forever.
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(transmembrane_value(inf, 1e9, cfg) == -85.0);

  ActivationMap atm;
  atm.t_ms = {0.0, 1.0, inf};
  const std::vector<double> vm = transmembrane_trace(atm, 1.0, cfg);
  CHECK(vm[0] == doctest::Approx(-30.0));
  CHECK(vm[1] == -85.0);
  CHECK(vm[2] == -85.0);
}

TEST_CASE("derive_leads arithmetic and errors") {
  // All identical series -> every lead vanishes.
  auto p = zero_potentials(4);
  for (auto& [name, s] : p) s.assign(4, 3.25);
  auto leads = derive_leads(p);
  for (const auto& l : leads)
    for (double v : l) CHECK(v == 0.0);

  // LA=+1, RA=-1: I = 2, II = 1, precordials see a zero central terminal.
  p = zero_potentials(3);
  p["LA"].assign(3, 1.0);
  p["RA"].assign(3, -1.0);
  leads = derive_leads(p);
  for (int s = 0; s < 3; ++s) {
    CHECK(leads[0][s] == doctest::Approx(2.0));
    CHECK(leads[1][s] == doctest::Approx(1.0));
    for (int v = 0; v < 6; ++v) CHECK(leads[2 + v][s] == doctest::Approx(0.0));
  }

  // Name-keyed: swapping LA and RA flips lead I.
  auto swapped = p;
  std::swap(swapped["LA"], swapped["RA"]);
  const auto leads2 = derive_leads(swapped);
  CHECK(leads2[0][0] == doctest::Approx(-2.0));

  // V3 potential moves only lead V3.
  p = zero_potentials(2);
  p["V3"].assign(2, 0.5);
  leads = derive_leads(p);
  CHECK(leads[4][0] == doctest::Approx(0.5));
  CHECK(leads[3][0] == 0.0);
  CHECK(leads[5][0] == 0.0);

  auto missing = zero_potentials(4);
  missing.erase("V5");
  CHECK_THROWS_AS(derive_leads(missing), ValidationError);

  auto ragged = zero_potentials(4);
  ragged["LL"].resize(3);
  CHECK_THROWS_AS(derive_leads(ragged), ValidationError);
}

TEST_CASE("uniform activation nulls every lead exactly") {
  const Mesh slab = build_slab(SlabSpec{});
  const ElectrodeSet el = default_electrodes(slab);
  EcgConfig cfg;
  cfg.l_qrs = 64;

  for (double t0 : {0.0, 5.25}) {
    const ActivationMap atm = constant_map(slab.node_count(), t0);
    const PotentialTraces pot = electrode_potentials(slab, atm, el, cfg);
    for (const auto& series : pot.series)
      for (double v : series) CHECK(v == 0.0);

    const EcgRecord rec = simulate_qrs(slab, atm, el, cfg);
    REQUIRE(rec.length() == 64);
    for (const auto& lead : rec.leads)
      for (double v : lead) CHECK(v == 0.0);
  }
}

TEST_CASE("nonzero records are max-abs normalized to exactly 1") {
  const Mesh slab = build_slab(SlabSpec{});
  const ElectrodeSet el = default_electrodes(slab);
  EcgConfig cfg;
  cfg.l_qrs = 128;
  const EcgRecord rec = simulate_qrs(slab, slab_wave(slab, true), el, cfg);

  double m = 0.0;
  for (const auto& lead : rec.leads) {
    REQUIRE(static_cast<int>(lead.size()) == cfg.l_qrs);
    for (double v : lead) m = std::max(m, std::abs(v));
  }
  CHECK(m == 1.0);
  CHECK(rec.qrs_onset == 0);
  CHECK(rec.qrs_offset == cfg.l_qrs - 1);
  CHECK(rec.dt_effective_ms > 0.0);
}

TEST_CASE("wave direction sets the deflection polarity") {
  const Mesh slab = build_slab(SlabSpec{});
  EcgConfig cfg;

  // One probe electrode past the +x face, well clear of the tissue.
  ElectrodeSet probe;
  probe.names = {"P"};
  probe.positions = {{120.0, 10.0, 5.0}};

  auto dominant = [&](const ActivationMap& atm) {
    const PotentialTraces pot = electrode_potentials(slab, atm, probe, cfg);
    double best = 0.0;
    for (double v : pot.series[0])
      if (std::abs(v) > std::abs(best)) best = v;
    return best;
  };

  const double toward = dominant(slab_wave(slab, true));
  const double away = dominant(slab_wave(slab, false));
  CHECK(toward > 0.0);  // approaching front -> positive deflection
  CHECK(away < 0.0);
  CHECK(std::abs(toward) > 1e-12);
}

TEST_CASE("electrode inside the tissue is rejected") {
  const Mesh slab = build_slab(SlabSpec{});
  ElectrodeSet inside;
  inside.names = {"P"};
  inside.positions = {{30.0, 10.0, 5.0}};  // mid-slab
  CHECK_THROWS_AS(electrode_potentials(slab, slab_wave(slab, true), inside, EcgConfig{}),
                  ValidationError);
}

TEST_CASE("time-shift equivariance of the cropped record") {
  const Mesh slab = build_slab(SlabSpec{});
  const ElectrodeSet el = default_electrodes(slab);
  EcgConfig cfg;
  cfg.l_qrs = 128;

  const ActivationMap atm = slab_wave(slab, true);
  ActivationMap shifted = atm;
  for (double& t : shifted.t_ms) t += 7.0;

  const EcgRecord a = simulate_qrs(slab, atm, el, cfg);
  const EcgRecord b = simulate_qrs(slab, shifted, el, cfg);
  CHECK(a.dt_effective_ms == doctest::Approx(b.dt_effective_ms).epsilon(1e-12));
  for (int l = 0; l < 8; ++l)
    for (int s = 0; s < cfg.l_qrs; ++s)
      CHECK(a.leads[l][s] == doctest::Approx(b.leads[l][s]).epsilon(1e-9));
}

TEST_CASE("lumped conductivity factor scales raw potentials, not the record") {
  const Mesh slab = build_slab(SlabSpec{});
  const ElectrodeSet el = default_electrodes(slab);
  const ActivationMap atm = slab_wave(slab, true);

  EcgConfig base;
  base.l_qrs = 64;
  EcgConfig x4 = base;
  x4.lump_factor = 4.0;

  const PotentialTraces p1 = electrode_potentials(slab, atm, el, base);
  const PotentialTraces p4 = electrode_potentials(slab, atm, el, x4);
  for (std::size_t e = 0; e < p1.series.size(); ++e)
    for (std::size_t s = 0; s < p1.series[e].size(); ++s)
      CHECK(p4.series[e][s] == 4.0 * p1.series[e][s]);

  // Power-of-two scaling is exact, so the normalized records are bit-equal.
  const EcgRecord r1 = simulate_qrs(slab, atm, el, base);
  const EcgRecord r4 = simulate_qrs(slab, atm, el, x4);
  for (int l = 0; l < 8; ++l)
    for (int s = 0; s < base.l_qrs; ++s) CHECK(r1.leads[l][s] == r4.leads[l][s]);

  EcgConfig odd = base;
  odd.lump_factor = 3.7;
  const EcgRecord r37 = simulate_qrs(slab, atm, el, odd);
  for (int l = 0; l < 8; ++l)
    for (int s = 0; s < base.l_qrs; ++s)
      CHECK(r37.leads[l][s] == doctest::Approx(r1.leads[l][s]).epsilon(1e-12));
}

TEST_CASE("default electrodes: deterministic, outside the tissue, translation-equivariant") {
  const Mesh m = build_phantom(PhantomSpec{}, 1);
  const ElectrodeSet a = default_electrodes(m);
  REQUIRE(a.names.size() == 10);
  REQUIRE(a.positions.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(a.names[i] == kStandardElectrodes[i]);

  const double clearance = mean_edge_length(m);
  for (const Vec3& p : a.positions) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const Vec3& n : m.nodes) dmin = std::min(dmin, norm(p - n));
    CHECK(dmin > clearance);
  }

  const ElectrodeSet b = default_electrodes(m);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.positions[i].x == b.positions[i].x);
    CHECK(a.positions[i].y == b.positions[i].y);
    CHECK(a.positions[i].z == b.positions[i].z);
  }

  Mesh shifted = m;
  for (Vec3& n : shifted.nodes) n = n + Vec3{50.0, 0.0, 0.0};
  const ElectrodeSet c = default_electrodes(shifted);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(c.positions[i].x == doctest::Approx(a.positions[i].x + 50.0).epsilon(1e-9));
    CHECK(c.positions[i].y == doctest::Approx(a.positions[i].y).epsilon(1e-9));
    CHECK(c.positions[i].z == doctest::Approx(a.positions[i].z).epsilon(1e-9));
  }
}

TEST_CASE("lead naming convention") {
  CHECK(std::string(EcgRecord::lead_names[0]) == "I");
  CHECK(std::string(EcgRecord::lead_names[1]) == "II");
  CHECK(std::string(EcgRecord::lead_names[7]) == "V6");
}

}  // TEST_SUITE

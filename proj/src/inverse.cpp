#include "cardiotwin/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "cardiotwin/parallel.hpp"

namespace cardiotwin {

void InverseConfig::validate() const {
  if (budget < 0) throw ValidationError("InverseConfig: budget must be >= 0");
  if (!(tol > 0.0)) throw ValidationError("InverseConfig: tol must be positive");
  if (jobs < 1) throw ValidationError("InverseConfig: jobs must be >= 1");
  for (double s : simplex_steps)
    if (!(s > 0.0)) throw ValidationError("InverseConfig: simplex steps must be positive");
}

double inverse_objective(const EcgRecord& observed, const EcgRecord& simulated) {
  const double dur_o = qrs_duration_ms(observed);
  const double dur_s = qrs_duration_ms(simulated);
  double acc = 0.0;
  for (int l = 0; l < 8; ++l)
    acc += dtw_distance(observed.leads[l], simulated.leads[l], dur_o, dur_s);
  return acc / 8.0;
}

double inverse_objective(const InfarctSpec& theta, const EcgRecord& observed, const Mesh& mesh,
                         const CvConfig& cv, const RootNodes& roots,
                         const ElectrodeSet& electrodes, const EcgConfig& ecfg) {
  const ForwardResult fr =
      forward_simulate(mesh, &theta, cv, roots, electrodes, ecfg, "candidate");
  return inverse_objective(observed, fr.record);
}

namespace {

using Params = std::array<double, 5>;  // ab0, rt0, r_tm, r_ab, r_rt

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Canonical search point: ab clamped, rt wrapped, radii clamped, everything
// quantized to 3 decimals so the solve cache has exact keys. tm0, tv, and
// bz_scale stay fixed at the grid winner's values.
InfarctSpec canonical(const Params& x, const InfarctSpec& base) {
  const auto q = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  InfarctSpec s = base;
  s.center.ab = q(clamp01(x[0]));
  s.center.rt = fract(q(fract(x[1])));
  s.r_tm = q(std::max(0.0, x[2]));
  s.r_ab = q(std::max(0.0, x[3]));
  s.r_rt = q(std::max(0.0, x[4]));
  return s;
}

std::array<long long, 5> cache_key(const InfarctSpec& s) {
  const auto k = [](double v) { return std::llround(v * 1000.0); };
  return {k(s.center.ab), k(s.center.rt), k(s.r_tm), k(s.r_ab), k(s.r_rt)};
}

struct Evaluator {
  const EcgRecord& observed;
  const Mesh& mesh;
  const CvConfig& cv;
  const RootNodes& roots;
  const ElectrodeSet& electrodes;
  const EcgConfig& ecfg;
  int budget;
  int solves = 0;
  std::map<std::array<long long, 5>, double> cache;

  // Simulates at most once per quantized point; returns false without a
  // value when a fresh solve is needed but the budget is spent.
  bool eval(const InfarctSpec& theta, double& out) {
    const auto key = cache_key(theta);
    if (const auto it = cache.find(key); it != cache.end()) {
      out = it->second;
      return true;
    }
    if (solves >= budget) return false;
    ++solves;
    out = inverse_objective(theta, observed, mesh, cv, roots, electrodes, ecfg);
    cache.emplace(key, out);
    return true;
  }
};

struct Vertex {
  Params x;
  double f;
};

struct BestEver {
  InfarctSpec theta;
  double f;

  void offer(const InfarctSpec& th, double v) {
    if (v < f) {
      f = v;
      theta = th;
    }
  }
};

bool build_simplex(Evaluator& ev, const InfarctSpec& base, const Params& x0,
                   const std::array<double, 5>& steps, std::vector<Vertex>& out, BestEver& best) {
  out.clear();
  for (int i = 0; i <= 5; ++i) {
    Params x = x0;
    if (i > 0) x[i - 1] += steps[i - 1];
    const InfarctSpec th = canonical(x, base);
    double f;
    if (!ev.eval(th, f)) return false;
    best.offer(th, f);
    out.push_back({x, f});
  }
  return true;
}

// One Nelder-Mead run; true when the objective spread fell below tol, false
// when the budget ran out first.
bool run_simplex(Evaluator& ev, const InfarctSpec& base, std::vector<Vertex>& s, double tol,
                 BestEver& best) {
  const auto eval_at = [&](const Params& x, double& f) {
    const InfarctSpec th = canonical(x, base);
    if (!ev.eval(th, f)) return false;
    best.offer(th, f);
    return true;
  };

  for (;;) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (s.back().f - s.front().f < tol) return true;

    Params c{};
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      for (int d = 0; d < 5; ++d) c[d] += s[i].x[d];
    for (int d = 0; d < 5; ++d) c[d] /= 5.0;

    const Params xw = s.back().x;
    Params xr;
    for (int d = 0; d < 5; ++d) xr[d] = c[d] + (c[d] - xw[d]);
    double fr;
    if (!eval_at(xr, fr)) return false;

    if (fr < s.front().f) {
      Params xe;
      for (int d = 0; d < 5; ++d) xe[d] = c[d] + 2.0 * (c[d] - xw[d]);
      double fe;
      if (!eval_at(xe, fe)) return false;
      s.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < s[s.size() - 2].f) {
      s.back() = {xr, fr};
      continue;
    }

    const Params& anchor = fr < s.back().f ? xr : xw;
    Params xc;
    for (int d = 0; d < 5; ++d) xc[d] = c[d] + 0.5 * (anchor[d] - c[d]);
    double fc;
    if (!eval_at(xc, fc)) return false;
    if (fc < std::min(fr, s.back().f)) {
      s.back() = {xc, fc};
      continue;
    }

    for (std::size_t i = 1; i < s.size(); ++i) {
      for (int d = 0; d < 5; ++d) s[i].x[d] = s[0].x[d] + 0.5 * (s[i].x[d] - s[0].x[d]);
      if (!eval_at(s[i].x, s[i].f)) return false;
    }
  }
}

}  // namespace

InverseResult invert(const EcgRecord& observed, const Mesh& mesh,
                     const std::vector<ScenarioSpec>& candidates, const RootNodes& roots,
                     const ElectrodeSet& electrodes, const EcgConfig& ecfg,
                     const InverseConfig& icfg) {
  icfg.validate();
  if (candidates.empty()) throw ValidationError("invert: candidate set is empty");
  if (observed.length() == 0) throw ValidationError("invert: observed record is empty");
  qrs_duration_ms(observed);  // rejects an all-zero observation up front

  const int n = static_cast<int>(candidates.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> obj(n, inf);
  std::vector<std::string> errors(n);
  parallel_for(n, icfg.jobs, [&](int i) {
    try {
      obj[i] = inverse_objective(candidates[i].infarct, observed, mesh, candidates[i].cv, roots,
                                 electrodes, ecfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  int winner = 0;
  for (int i = 1; i < n; ++i)
    if (obj[i] < obj[winner]) winner = i;
  if (!(obj[winner] < inf))
    throw NumericError("invert: every grid candidate failed to simulate (first error: " +
                       errors[0] + ")");

  InverseResult res;
  res.stage1_name = candidates[winner].name;
  res.stage1_objective = obj[winner];
  res.best = candidates[winner].infarct;
  res.objective = obj[winner];
  res.forward_solves = n;

  if (icfg.budget > 0) {
    const ScenarioSpec& w = candidates[winner];
    Evaluator ev{observed, mesh, w.cv, roots, electrodes, ecfg, icfg.budget, 0, {}};
    BestEver best{res.best, res.objective};

    Params start{w.infarct.center.ab, w.infarct.center.rt, w.infarct.r_tm, w.infarct.r_ab,
                 w.infarct.r_rt};
    std::array<double, 5> steps = icfg.simplex_steps;
    SplitMix64 rng{icfg.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL};
    std::vector<Vertex> simplex;

    bool restarted = false;
    for (;;) {
      if (!build_simplex(ev, w.infarct, start, steps, simplex, best)) break;
      if (!run_simplex(ev, w.infarct, simplex, icfg.tol, best)) break;
      if (restarted) break;
      // One restart on convergence: re-seed the simplex around the best
      // point so far with jittered steps.
      restarted = true;
      start = {best.theta.center.ab, best.theta.center.rt, best.theta.r_tm, best.theta.r_ab,
               best.theta.r_rt};
      for (int d = 0; d < 5; ++d)
        steps[d] = icfg.simplex_steps[d] * (0.5 + rng.next_unit());
    }

    res.best = best.theta;
    res.objective = best.f;
    res.forward_solves = n + ev.solves;
  }

  res.labeling = label_tissue(mesh, res.best);
  return res;
}

}  // namespace cardiotwin

#include "cardiotwin/metrics.hpp"

#include "cardiotwin/qrs_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace cardiotwin {

namespace {

double mean_sq_nn(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  double acc = 0.0;
  for (const Vec3& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) best = std::min(best, norm2(p - q));
    acc += best;
  }
  return acc / static_cast<double>(from.size());
}

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 c{0, 0, 0};
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

}  // namespace

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw ValidationError("chamfer_distance: empty point set");
  return mean_sq_nn(a, b) + mean_sq_nn(b, a);
}

double reconstruction_loss_pc(const std::vector<std::vector<Vec3>>& input_coarse,
                              const std::vector<std::vector<Vec3>>& input_dense,
                              const std::vector<std::vector<Vec3>>& recon_coarse,
                              const std::vector<std::vector<Vec3>>& recon_dense, double alpha) {
  const std::size_t k = input_coarse.size();
  if (input_dense.size() != k || recon_coarse.size() != k || recon_dense.size() != k)
    throw ValidationError("reconstruction_loss_pc: class-count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    acc += chamfer_distance(input_coarse[i], recon_coarse[i]) +
           alpha * chamfer_distance(input_dense[i], recon_dense[i]);
  return acc;
}

double reconstruction_loss_qrs(const EcgRecord& a, const EcgRecord& b) {
  if (a.length() == 0 || a.length() != b.length())
    throw ValidationError("reconstruction_loss_qrs: record lengths differ");
  double mse = 0.0, dtw = 0.0;
  for (int l = 0; l < 8; ++l) {
    double acc = 0.0;
    for (int s = 0; s < a.length(); ++s) {
      const double d = a.leads[l][s] - b.leads[l][s];
      acc += d * d;
    }
    mse += acc / a.length();
    dtw += dtw_distance(a.leads[l], b.leads[l]);
  }
  return (mse + dtw) / 8.0;
}

double kl_divergence_std_normal(const std::vector<double>& mu, const std::vector<double>& sigma) {
  if (mu.size() != sigma.size())
    throw ValidationError("kl_divergence: mu and sigma sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (sigma[i] <= 0.0) throw ValidationError("kl_divergence: sigma must be positive");
    acc += 0.5 * (mu[i] * mu[i] + sigma[i] * sigma[i] - 1.0) - std::log(sigma[i]);
  }
  return acc;
}

double segmentation_loss(const std::vector<std::array<double, 3>>& probs,
                         const std::vector<TissueClass>& truth, double lambda_dice) {
  if (probs.empty() || probs.size() != truth.size())
    throw ValidationError("segmentation_loss: size mismatch");
  const double n = static_cast<double>(probs.size());

  double ce = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto& p = probs[i];
    if (p[0] < 0.0 || p[1] < 0.0 || p[2] < 0.0 || std::abs(p[0] + p[1] + p[2] - 1.0) > 1e-6)
      throw ValidationError("segmentation_loss: probability row does not sum to 1");
    const double py = p[static_cast<int>(truth[i])];
    if (py <= 0.0) throw NumericError("segmentation_loss: zero probability on the true class");
    ce -= std::log(py);
  }
  ce /= n;

  double dice_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    double inter = 0.0, pmass = 0.0, gmass = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double g = truth[i] == static_cast<TissueClass>(c) ? 1.0 : 0.0;
      inter += probs[i][c] * g;
      pmass += probs[i][c];
      gmass += g;
    }
    dice_sum += (pmass + gmass) > 0.0 ? 2.0 * inter / (pmass + gmass) : 1.0;
  }
  return ce + lambda_dice * (1.0 - dice_sum / 3.0);
}

DicePRF dice_precision_recall(const std::vector<int>& pred, const std::vector<int>& truth) {
  const std::set<int> p(pred.begin(), pred.end());
  const std::set<int> g(truth.begin(), truth.end());
  if (p.empty() && g.empty()) return {1.0, 1.0, 1.0};
  std::size_t inter = 0;
  for (int i : p) inter += g.count(i);
  const double dice = 2.0 * inter / static_cast<double>(p.size() + g.size());
  const double precision = p.empty() ? 0.0 : inter / static_cast<double>(p.size());
  const double recall = g.empty() ? 0.0 : inter / static_cast<double>(g.size());
  return {dice, precision, recall};
}

DicePRF dice_precision_recall(const TissueLabeling& pred, const TissueLabeling& gd,
                              TissueClass cls) {
  if (pred.node_class.size() != gd.node_class.size())
    throw ValidationError("dice_precision_recall: labeling lengths differ");
  return dice_precision_recall(pred.nodes_of(cls), gd.nodes_of(cls));
}

double compactness_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& gd) {
  if (pred.empty()) throw ValidationError("compactness_loss: empty prediction");
  if (gd.empty()) throw ValidationError("compactness_loss: empty ground truth");
  const Vec3 c_pred = centroid(pred);
  const Vec3 c_gd = centroid(gd);
  double d_max = 0.0;
  for (const Vec3& q : gd) d_max = std::max(d_max, norm(q - c_gd));
  if (d_max == 0.0) throw NumericError("compactness_loss: degenerate ground truth (zero spread)");
  double acc = 0.0;
  for (const Vec3& p : pred) acc += (norm(p - c_pred) + norm(p - c_gd)) / d_max;
  return acc / static_cast<double>(pred.size());
}

SizeLoss size_loss(int n_pre, int n_gd) {
  if (n_gd <= 0) throw ValidationError("size_loss: ground-truth count must be positive");
  if (n_pre < 0) throw ValidationError("size_loss: negative prediction count");
  const double v = static_cast<double>(n_pre - n_gd) / static_cast<double>(n_gd);
  return {v, std::abs(v)};
}

double spa_loss(int n_rv, int n_pre) {
  if (n_rv < 0 || n_pre < 0 || n_rv > n_pre) throw ValidationError("spa_loss: invalid counts");
  if (n_pre == 0) return 0.0;
  return static_cast<double>(n_rv) / static_cast<double>(n_pre);
}

int rv_infarct_count(const TissueLabeling& labeling, const Mesh& mesh, double rt_margin) {
  if (labeling.node_class.size() != mesh.nodes.size())
    throw ValidationError("rv_infarct_count: labeling does not match mesh");
  int n = 0;
  for (std::size_t i = 0; i < labeling.node_class.size(); ++i) {
    if (labeling.node_class[i] == TissueClass::healthy) continue;
    const CobivecoCoord& c = mesh.cobiveco[i];
    if (c.tv == 1 && (2.0 / 3.0 - c.rt) > rt_margin) ++n;
  }
  return n;
}

TotalLosses total_losses(const LossComponents& c, const LossWeights& w) {
  TotalLosses out;
  out.vae = w.lambda_pc * c.pc + w.lambda_qrs * c.qrs + w.lambda_kl * c.kl;
  out.inference = w.lambda_vae * out.vae + c.seg + w.lambda_compact * c.compact +
                  w.lambda_size * c.size + w.lambda_spa * c.spa;
  return out;
}

AhaLocScore aha_loc_score(const TissueLabeling& pred, const TissueLabeling& gd, const Mesh& mesh,
                          double w_delta, double w_iou, double w_dist, const AhaConfig& aha) {
  if (pred.node_class.size() != mesh.nodes.size() || gd.node_class.size() != mesh.nodes.size())
    throw ValidationError("aha_loc_score: labeling does not match mesh");
  if (std::abs(w_delta + w_iou + w_dist - 1.0) > 1e-9)
    throw ValidationError("aha_loc_score: weights must sum to 1");

  const std::vector<int> gd_scar = gd.nodes_of(TissueClass::scar);
  if (gd_scar.empty()) throw ValidationError("aha_loc_score: ground truth has no scar");
  const std::vector<int> pred_scar = pred.nodes_of(TissueClass::scar);
  if (pred_scar.empty()) return {0.0, 0.0, 0.0, 1.0};

  // Scar centers: mean position snapped to the nearest member node.
  auto snapped_center = [&](const std::vector<int>& nodes) {
    Vec3 c{0, 0, 0};
    for (int i : nodes) c += mesh.nodes[i];
    c = c / static_cast<double>(nodes.size());
    int best = nodes.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int i : nodes) {
      const double d = norm2(mesh.nodes[i] - c);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  const int center_pred = snapped_center(pred_scar);
  const int center_gd = snapped_center(gd_scar);

  auto segment_of = [&](int node) {
    const CobivecoCoord& c = mesh.cobiveco[node];
    return in_lv(c) ? aha_segment(c, aha) : -1;
  };
  const int seg_pred = segment_of(center_pred);
  const int seg_gd = segment_of(center_gd);
  const double delta = (seg_pred > 0 && seg_pred == seg_gd) ? 1.0 : 0.0;

  auto segments_of = [&](const std::vector<int>& nodes) {
    std::set<int> segs;
    for (int i : nodes) {
      const int s = segment_of(i);
      if (s > 0) segs.insert(s);
    }
    return segs;
  };
  const std::set<int> segs_pred = segments_of(pred_scar);
  const std::set<int> segs_gd = segments_of(gd_scar);
  std::size_t inter = 0;
  for (int s : segs_pred) inter += segs_gd.count(s);
  const std::size_t uni = segs_pred.size() + segs_gd.size() - inter;
  const double iou = uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;

  const double diag = bounding_box(mesh.nodes).diagonal();
  const double d_c =
      std::min(1.0, norm(mesh.nodes[center_pred] - mesh.nodes[center_gd]) / diag);

  return {w_delta * delta + w_iou * iou + w_dist * (1.0 - d_c), delta, iou, d_c};
}

}  // namespace cardiotwin

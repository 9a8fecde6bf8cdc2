#pragma once

#include <array>
#include <vector>

#include "cardiotwin/cobiveco.hpp"
#include "cardiotwin/pseudo_ecg.hpp"
#include "cardiotwin/scenario.hpp"
#include "cardiotwin/types.hpp"

namespace cardiotwin {

// Symmetric chamfer distance: mean squared nearest-neighbor distance from a
// to b plus the same from b to a. Throws ValidationError on empty inputs.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Two-resolution point-cloud reconstruction loss over K anatomical classes:
// sum_k chamfer(coarse_k) + alpha * chamfer(dense_k).
double reconstruction_loss_pc(const std::vector<std::vector<Vec3>>& input_coarse,
                              const std::vector<std::vector<Vec3>>& input_dense,
                              const std::vector<std::vector<Vec3>>& recon_coarse,
                              const std::vector<std::vector<Vec3>>& recon_dense,
                              double alpha = 5.0);

// Mean over the eight leads of per-lead MSE plus plain DTW (no duration
// penalty). Records must have equal lengths.
double reconstruction_loss_qrs(const EcgRecord& a, const EcgRecord& b);

// KL divergence of a diagonal Gaussian against the standard normal:
// sum_i 0.5 (mu_i^2 + sigma_i^2 - 1) - ln sigma_i.
double kl_divergence_std_normal(const std::vector<double>& mu,
                                const std::vector<double>& sigma);

// Cross-entropy plus soft-Dice segmentation loss over the three tissue
// classes. Probability rows must sum to 1 within 1e-6.
double segmentation_loss(const std::vector<std::array<double, 3>>& probs,
                         const std::vector<TissueClass>& truth, double lambda_dice = 1.0);

struct DicePRF {
  double dice, precision, recall;
};
// Overlap of two node-index sets. Empty vs empty is defined as (1,1,1).
DicePRF dice_precision_recall(const std::vector<int>& pred, const std::vector<int>& truth);
// Same, over the nodes of one tissue class in two labelings of the same mesh.
DicePRF dice_precision_recall(const TissueLabeling& pred, const TissueLabeling& gd,
                              TissueClass cls);

// Mean over predicted points of (distance to predicted center + distance to
// ground-truth center), normalized by the ground truth's maximal
// center-to-point distance. Throws on empty inputs (ValidationError) and on
// a degenerate ground truth with zero spread (NumericError).
double compactness_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& gd);

struct SizeLoss {
  double value;      // signed (n_pre - n_gd) / n_gd
  double abs_value;
};
SizeLoss size_loss(int n_pre, int n_gd);

// Fraction of predicted infarct points lying in the RV free wall.
double spa_loss(int n_rv, int n_pre);

// Infarct (scar or border-zone) nodes counted as RV for the spatial loss:
// tv = 1 nodes rotationally clear of the septal threshold by more than the
// margin.
int rv_infarct_count(const TissueLabeling& labeling, const Mesh& mesh, double rt_margin = 0.02);

struct LossWeights {
  double alpha = 5.0;
  double lambda_pc = 1.0;
  double lambda_qrs = 1.0;
  double lambda_kl = 0.01;
  double lambda_dice = 1.0;
  double lambda_vae = 1.0;
  double lambda_compact = 1.0;
  double lambda_size = 1.0;
  double lambda_spa = 1.0;
};

struct LossComponents {
  double pc = 0.0, qrs = 0.0, kl = 0.0;
  double seg = 0.0, compact = 0.0, size = 0.0, spa = 0.0;
};

struct TotalLosses {
  double vae;        // lambda_pc pc + lambda_qrs qrs + lambda_kl kl
  double inference;  // lambda_vae vae + seg + weighted compact/size/spa
};
TotalLosses total_losses(const LossComponents& c, const LossWeights& w = {});

// Localization agreement of two scar labelings: weighted sum of center-
// segment equality, segment-set IoU, and one minus the center distance
// normalized by the mesh bounding-box diagonal (clamped to [0,1]).
// An empty prediction scores 0. Throws when the ground truth has no scar.
struct AhaLocScore {
  double score;
  double delta;        // 1 when center segments match
  double iou;          // over occupied segment-id sets
  double center_dist;  // normalized, clamped
};
AhaLocScore aha_loc_score(const TissueLabeling& pred, const TissueLabeling& gd, const Mesh& mesh,
                          double w_delta = 0.5, double w_iou = 0.2, double w_dist = 0.3,
                          const AhaConfig& aha = {});

}  // namespace cardiotwin

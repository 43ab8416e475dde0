#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sdc/calibration.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

// Pairwise similarities of one mini-batch: t from features, s from continuous
// codes, over all unordered intra-batch pairs i < j. The continuous-code
// batch is kept so losses can push gradients back through the cosine.
struct SimilarityBatch {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<std::pair<uint32_t, uint32_t>> pair_index;
    Matrix codes;  // the f batch the s values were computed from

    size_t size() const { return t.size(); }
};

struct LossValueAndGrad {
    double value = 0.0;
    Matrix grad_f;  // d(loss)/d(f), batch x K
};

// All B(B-1)/2 unordered pairs of a batch. t and s are cosines of the raw
// feature rows and continuous-code rows respectively.
SimilarityBatch build_pair_batch(const Matrix& x_batch, const Matrix& f_batch);

// Calibration loss: sort pairs ascending by t (stable), target the i-th one
// at the calibration iCDF of quantile (2i-1)/(2n) mapped to [-1, 1], and
// average the absolute gaps. Subgradient of |u| at u = 0 is 0.
LossValueAndGrad sdc_loss(const SimilarityBatch& batch, const BetaDistribution& calib);

// Same, with the target quantiles supplied directly (ascending, length n).
LossValueAndGrad sdc_loss_with_targets(const SimilarityBatch& batch,
                                       std::span<const double> targets);

// Mean 1 - cos(f_i, sign(f_i)); the signed code is a constant in the gradient.
LossValueAndGrad quantization_loss(const Matrix& f_batch);

// Pairwise similarity preservation: mean |t - s|^p, p in {1, 2}.
LossValueAndGrad preservation_loss(const SimilarityBatch& batch, int p);

// NT-Xent over the 2B normalized continuous codes of two views; the positive
// of each anchor is its counterpart view. Returns gradients for both views.
struct ContrastiveLoss {
    double value = 0.0;
    Matrix grad_view1;
    Matrix grad_view2;
};
ContrastiveLoss contrastive_loss(const Matrix& f_view1, const Matrix& f_view2,
                                 double temperature);

// Continuous codes of the two augmented views of one batch.
struct ViewPair {
    Matrix f_view1;
    Matrix f_view2;
};

enum class Objective {
    sdc,           // calibration loss (the default)
    preservation,  // pairwise preservation baseline
};

struct TotalLossResult {
    double value = 0.0;
    double alignment = 0.0;  // sdc or preservation component
    double quantization = 0.0;
    double contrastive = 0.0;
    Matrix grad_f;
    Matrix grad_view1;  // empty unless the contrastive term is active
    Matrix grad_view2;
};

struct TotalLossOptions {
    Objective objective = Objective::sdc;
    int preservation_p = 2;
    double lambda_q = 1.0;
    double lambda_cl = 1.0;
    double temperature = 0.2;
};

// Weighted sum of the active components. The contrastive term is skipped
// when lambda_cl = 0 or no views are given.
TotalLossResult total_loss(const Matrix& f_batch, const Matrix& x_batch,
                           const BetaDistribution& calib, const TotalLossOptions& opts,
                           const ViewPair* views = nullptr);

}  // namespace sdc

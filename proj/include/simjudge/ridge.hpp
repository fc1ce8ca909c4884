#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "simjudge/embedding_store.hpp"
#include "simjudge/similarity.hpp"

namespace simjudge {

// Diagonal reweighting z1' W z2 + b with W = diag(weights).
struct RidgeModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double alpha = 1.0;
    // Whether embeddings were unit-normalised before building pair features.
    bool unit_normalized = true;

    std::size_t feature_dim() const { return static_cast<std::size_t>(weights.size()); }
};

// One row z_i * z_j (elementwise) per pair, with the human similarity as target.
struct PairDesign {
    Eigen::MatrixXd rows;
    Eigen::VectorXd targets;
    std::vector<PairIndex> pairs;
    bool unit_normalized = true;

    std::size_t size() const { return pairs.size(); }
    PairDesign subset(std::span<const std::size_t> row_indices) const;
};

struct FeatureOptions {
    bool unit_normalize = true;
};

// `embs` must list stimuli in the order of human.ids.
PairDesign build_pair_design(const EmbeddingTable& embs, const SimilarityMatrix& human,
                             std::span<const PairIndex> pairs, FeatureOptions options = {});

struct RidgeOptions {
    bool fit_intercept = true;
    // Z-score feature columns before solving; weights are mapped back to the
    // raw feature scale afterwards.
    bool standardize = false;
};

// Minimises sum (y - b - x'w)^2 + alpha |w|^2 with b unpenalised, by a
// Cholesky solve of the centred normal equations. alpha = 0 is accepted only
// when the normal matrix is non-singular.
RidgeModel fit_ridge(const PairDesign& design, double alpha, RidgeOptions options = {});

// Same, on explicit matrices (used by the oracle tests).
RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                     RidgeOptions options = {});

// Ten log-spaced values from 1e-3 to 1e6.
std::vector<double> default_alpha_grid();

struct AlphaSelection {
    double alpha = 0.0;
    std::vector<double> mean_r2;  // one per grid value; empty for a one-value grid
};

// Image-grouped inner cross-validation: inner folds partition the images
// touched by the design; a validation row needs both images in the fold and a
// training row needs both outside it. Picks the highest mean validation R^2;
// ties go to the larger alpha.
AlphaSelection select_alpha(const PairDesign& design, std::span<const double> alphas,
                            std::size_t inner_folds, std::uint64_t seed,
                            RidgeOptions options = {});

Eigen::VectorXd predict(const PairDesign& design, const RidgeModel& model);
Eigen::VectorXd predict(const Eigen::MatrixXd& rows, const RidgeModel& model);

// Model JSON: alpha, intercept, weights, feature_dim, normalization.
std::string model_to_json(const RidgeModel& model);
RidgeModel model_from_json(std::string_view text);

}  // namespace simjudge

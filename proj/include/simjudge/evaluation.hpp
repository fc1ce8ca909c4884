#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simjudge/embedding_store.hpp"
#include "simjudge/folds.hpp"
#include "simjudge/ridge.hpp"
#include "simjudge/scoring.hpp"
#include "simjudge/similarity.hpp"

namespace simjudge {

struct EvalOptions {
    std::vector<double> alphas = default_alpha_grid();
    std::size_t inner_folds = 5;
    std::uint64_t seed = 0;
    FeatureOptions features;
    RidgeOptions ridge;
    std::size_t jobs = 1;
};

// R^2 plus the signed correlation it came from.
struct MethodScore {
    double r2 = 0.0;
    double r = 0.0;
};

struct FoldResult {
    std::size_t fold = 0;
    double alpha = 0.0;
    std::optional<double> r2;  // empty when the fold's predictions are constant
    std::size_t train_pairs = 0;
    std::size_t validation_pairs = 0;
    std::optional<std::size_t> layer;  // nested layer selection only
    RidgeModel model;
};

// One model's row group of the score table: Raw, LT-Train and LT-CCV.
struct EvalEntry {
    std::string model;
    std::size_t feature_dim = 0;
    MethodScore raw;
    MethodScore lt_train;
    MethodScore lt_ccv;  // pooled over all held-out pairs
    RidgeModel train_model;
    std::vector<FoldResult> folds;
    std::vector<PairIndex> ccv_pairs;
    std::vector<double> ccv_predictions;
    std::optional<std::size_t> layer;
    std::vector<double> layer_scores;
    std::string layer_mode;  // "", "post_hoc" or "nested"
};

// Raw: cosine over all pairs. LT-Train: alpha chosen by grouped inner CV on
// all pairs, fit and scored on all pairs. LT-CCV: per outer fold, alpha
// selection and fit on training pairs, prediction of the held-out pairs; all
// held-out predictions are pooled into one R^2 (per-fold R^2 kept as well).
EvalEntry evaluate_model(std::string name, const EmbeddingTable& embs,
                         const SimilarityMatrix& human, const FoldPlan& plan,
                         const EvalOptions& options);

// Evaluates every layer and keeps the best pooled LT-CCV score (ties go to
// the lower index). The returned entry records all layer scores.
EvalEntry select_layer(std::string name, std::span<const EmbeddingTable> layers,
                       const SimilarityMatrix& human, const FoldPlan& plan,
                       const EvalOptions& options);

// Layer choice made inside each outer fold from inner-CV scores on that
// fold's training pairs only. Raw and LT-Train rows use the most frequently
// chosen layer.
EvalEntry select_layer_nested(std::string name, std::span<const EmbeddingTable> layers,
                              const SimilarityMatrix& human, const FoldPlan& plan,
                              const EvalOptions& options);

// Symmetric matrix of LT-CCV predictions. Within-fold pairs hold the
// held-out prediction of their fold's model; pairs straddling folds a and b
// (never used for training by either model) hold the mean of the two models'
// predictions; the diagonal holds the self-similarity under the stimulus's
// own fold model. `tables` is either the single source table or the full
// layer list of a layer-selection entry.
SimilarityMatrix ccv_prediction_matrix(const EvalEntry& entry,
                                       std::span<const EmbeddingTable> tables,
                                       const SimilarityMatrix& human, const FoldPlan& plan);

struct EvalReport {
    std::string dataset;
    std::size_t k_folds = kDefaultFolds;
    std::uint64_t seed = 0;
    std::vector<double> alphas;
    std::vector<EvalEntry> entries;
};

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct Discrepancy {
    PairIndex pair;
    std::string id_i;
    std::string id_j;
    double z_a = 0.0;
    double z_b = 0.0;
    double z_human = 0.0;
    double gap = 0.0;  // |z_a - z_b|
};

// Pairs where two predictors disagree most, after z-scoring the off-diagonal
// entries of each matrix. top_k = 0 keeps every pair.
std::vector<Discrepancy> rank_discrepancies(const SimilarityMatrix& a, const SimilarityMatrix& b,
                                            const SimilarityMatrix& human, std::size_t top_k);

std::string discrepancies_to_csv(const std::vector<Discrepancy>& rows);

}  // namespace simjudge

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "simjudge/embedding_store.hpp"

namespace simjudge {

struct RidgeModel;

enum class MatrixKind { kHuman, kPredicted };

// Symmetric n x n matrix over an ordered stimulus list. The diagonal is
// stored but never used for fitting or scoring.
struct SimilarityMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd values;
    MatrixKind kind = MatrixKind::kPredicted;

    std::size_t size() const { return ids.size(); }

    // Throws InputError unless square, finite, symmetric within 1e-9 and
    // consistent with ids.
    void validate() const;
};

// Strict upper-triangle pair (i < j) of positions in a stimulus list.
struct PairIndex {
    std::size_t i = 0;
    std::size_t j = 0;
    friend bool operator==(const PairIndex&, const PairIndex&) = default;
    friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

// All pairs of n items, row-major over the strict upper triangle.
std::vector<PairIndex> all_pairs(std::size_t n);

// Off-diagonal values in all_pairs order.
std::vector<double> upper_triangle(const SimilarityMatrix& m);

double cosine(std::span<const double> a, std::span<const double> b);

// b + sum_k w_k a_k c_k; the weights are the diagonal of W.
double bilinear_similarity(std::span<const double> a, std::span<const double> b,
                           const RidgeModel& model);

// Returns a copy of `table` with every row scaled to unit L2 norm.
// Throws NumericError on a zero row.
EmbeddingTable unit_normalize(const EmbeddingTable& table);

// Raw cosine similarity between all stimuli (diagonal 1).
SimilarityMatrix cosine_matrix(const EmbeddingTable& embs);

// Fitted bilinear similarity. Rows are unit-normalised first when the model
// was fitted on normalised embeddings. Diagonal holds b + sum_k w_k z_k^2.
SimilarityMatrix fitted_matrix(const EmbeddingTable& embs, const RidgeModel& model);

// d_ij = s_max - s_ij off the diagonal, where s_max is the largest
// off-diagonal similarity; d_ii = 0.
Eigen::MatrixXd to_dissimilarity(const SimilarityMatrix& sim);

// Z-scores every table per dimension across stimuli and concatenates them
// id-wise (order of the first table). Dimensions with std < 1e-12 become 0.
EmbeddingTable normalize_concat(std::span<const EmbeddingTable> tables);

// Similarity-matrix CSV: "id,<id1>,...,<idn>" then "<idi>,v1,...,vn".
SimilarityMatrix parse_similarity_csv(std::string_view text, MatrixKind kind);
std::string write_similarity_csv(const SimilarityMatrix& m);
SimilarityMatrix read_similarity_csv(const std::string& path, MatrixKind kind);

// Reorders `embs` to follow `ids`; throws InputError listing a missing id.
EmbeddingTable align_to(const EmbeddingTable& embs, const std::vector<std::string>& ids);

}  // namespace simjudge

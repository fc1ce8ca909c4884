#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simjudge/similarity.hpp"

namespace simjudge {

// Assignment of images to cross-validation folds. Fold sizes differ by at
// most one and the plan is a pure function of (n, k, seed).
struct FoldPlan {
    std::size_t n_images = 0;
    std::size_t k_folds = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignment;  // image index -> fold id

    std::vector<std::size_t> members(std::size_t fold) const;
};

inline constexpr std::size_t kDefaultFolds = 6;

// Seeded permutation of the images split into k contiguous blocks.
// Requires k >= 2 and n >= 2k.
FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

struct CcvSplit {
    std::vector<PairIndex> train;       // both images outside the fold
    std::vector<PairIndex> validation;  // both images inside the fold
    std::size_t discarded = 0;          // one image on each side
};

// Throws std::logic_error if the two sides ever share an image.
CcvSplit ccv_split(const FoldPlan& plan, std::size_t fold);

}  // namespace simjudge

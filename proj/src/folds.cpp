#include "simjudge/folds.hpp"

#include <numeric>
#include <stdexcept>

#include "simjudge/errors.hpp"
#include "simjudge/rng.hpp"

namespace simjudge {

std::vector<std::size_t> FoldPlan::members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) out.push_back(i);
    }
    return out;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InputError("need at least 2 folds");
    if (n < 2 * k) {
        throw InputError("need at least " + std::to_string(2 * k) + " images for " +
                         std::to_string(k) + " folds, got " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, stream::kFolds));
    rng.shuffle(order);

    FoldPlan plan{n, k, seed, std::vector<std::size_t>(n)};
    // The first n % k folds take one extra image.
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t s = 0; s < size; ++s) plan.assignment[order[pos++]] = f;
    }
    return plan;
}

CcvSplit ccv_split(const FoldPlan& plan, std::size_t fold) {
    if (fold >= plan.k_folds) throw InputError("fold id out of range");
    CcvSplit split;
    const auto n = plan.n_images;
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_i = plan.assignment[i] == fold;
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool in_j = plan.assignment[j] == fold;
            if (in_i && in_j) {
                split.validation.push_back({i, j});
            } else if (!in_i && !in_j) {
                split.train.push_back({i, j});
            } else {
                ++split.discarded;
            }
        }
    }
    std::vector<char> train_images(n, 0);
    for (const auto& p : split.train) train_images[p.i] = train_images[p.j] = 1;
    for (const auto& p : split.validation) {
        if (train_images[p.i] || train_images[p.j]) {
            throw std::logic_error("ccv_split: validation pair shares an image with training");
        }
    }
    return split;
}

}  // namespace simjudge

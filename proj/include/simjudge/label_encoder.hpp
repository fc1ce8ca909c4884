#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simjudge/embedding_store.hpp"

namespace simjudge {

// Ordered set of class labels. Order is first appearance and is persisted
// next to encoded outputs so vector layouts are reproducible.
class LabelVocabulary {
public:
    LabelVocabulary() = default;
    explicit LabelVocabulary(const std::vector<std::string>& labels);

    std::size_t size() const { return classes_.size(); }
    const std::vector<std::string>& classes() const { return classes_; }
    // Throws InputError for labels outside the vocabulary.
    std::size_t index_of(std::string_view label) const;

private:
    std::vector<std::string> classes_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct OneHotVector {
    std::vector<double> v;
    std::size_t hot_index = 0;
};

OneHotVector encode_one_hot(std::string_view label, const LabelVocabulary& vocab);

inline constexpr double kDefaultSmoothing = 0.8;

// (1 - eps) v + eps / (k - 1) (1 - v). Requires k >= 2 and eps in [0, 1).
std::vector<double> smooth(const OneHotVector& one_hot, double epsilon);

// True when the hot component no longer exceeds the cold ones
// (1 - eps <= eps / (k - 1)), i.e. same-label and different-label pairs can
// no longer be told apart (or are inverted) by cosine similarity.
bool smoothing_degenerate(std::size_t k, double epsilon);

enum class LabelEncoding { kOneHot, kSmoothedOneHot };

// Encodes every stimulus label into a table keyed by stimulus id. The
// vocabulary is built from first appearance in `stimuli`.
struct EncodedLabels {
    LabelVocabulary vocab;
    EmbeddingTable table;
};
EncodedLabels encode_labels(const StimulusSet& stimuli, LabelEncoding encoding,
                            double epsilon = kDefaultSmoothing);

}  // namespace simjudge

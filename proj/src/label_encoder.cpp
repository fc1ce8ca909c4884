#include "simjudge/label_encoder.hpp"

#include "simjudge/errors.hpp"

namespace simjudge {

LabelVocabulary::LabelVocabulary(const std::vector<std::string>& labels) {
    for (const auto& label : labels) {
        if (index_.emplace(label, classes_.size()).second) classes_.push_back(label);
    }
}

std::size_t LabelVocabulary::index_of(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) throw InputError("unknown label '" + std::string(label) + "'");
    return it->second;
}

OneHotVector encode_one_hot(std::string_view label, const LabelVocabulary& vocab) {
    OneHotVector out;
    out.hot_index = vocab.index_of(label);
    out.v.assign(vocab.size(), 0.0);
    out.v[out.hot_index] = 1.0;
    return out;
}

std::vector<double> smooth(const OneHotVector& one_hot, double epsilon) {
    const std::size_t k = one_hot.v.size();
    if (k < 2) throw InputError("label smoothing needs at least 2 classes");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InputError("smoothing epsilon must be in [0, 1)");
    const double cold = epsilon / static_cast<double>(k - 1);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = (1.0 - epsilon) * one_hot.v[i] + cold * (1.0 - one_hot.v[i]);
    }
    return out;
}

bool smoothing_degenerate(std::size_t k, double epsilon) {
    if (k < 2) return true;
    // slack for round-off right at the boundary eps = (k - 1) / k
    return 1.0 - epsilon <= epsilon / static_cast<double>(k - 1) + 1e-12;
}

EncodedLabels encode_labels(const StimulusSet& stimuli, LabelEncoding encoding, double epsilon) {
    if (stimuli.labels.size() != stimuli.ids.size()) {
        throw InputError("every stimulus needs a label");
    }
    LabelVocabulary vocab(stimuli.labels);
    if (vocab.size() == 0) throw InputError("no labels to encode");
    EncodedLabels out{vocab, EmbeddingTable(vocab.size())};
    for (std::size_t i = 0; i < stimuli.ids.size(); ++i) {
        auto one_hot = encode_one_hot(stimuli.labels[i], vocab);
        if (encoding == LabelEncoding::kSmoothedOneHot) {
            out.table.add(stimuli.ids[i], smooth(one_hot, epsilon));
        } else {
            out.table.add(stimuli.ids[i], one_hot.v);
        }
    }
    return out;
}

}  // namespace simjudge

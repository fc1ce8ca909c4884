#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "simjudge/errors.hpp"

namespace simjudge {

// Named vectors of a common dimension, in insertion order. Immutable once
// built, so concurrent readers need no synchronisation.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim);

    // Throws InputError on empty or space-containing names, duplicate names,
    // wrong length or non-finite components.
    void add(std::string name, std::span<const double> vector);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }

    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }

    std::optional<std::size_t> find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name).has_value(); }

    // Row lookup by name; throws InputError if absent.
    std::span<const double> at(std::string_view name) const;

    // n x dim copy of the values.
    Eigen::MatrixXd matrix() const;

    // Builds a table from a matrix whose rows follow `names`.
    static EmbeddingTable from_matrix(const std::vector<std::string>& names,
                                      const Eigen::MatrixXd& values);

    friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
        return a.dim_ == b.dim_ && a.names_ == b.names_ && a.values_ == b.values_;
    }

private:
    std::size_t dim_;
    std::vector<std::string> names_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Text format: "<count> <dim>\n" followed by count lines of
// "<name> <v1> ... <vdim>\n". Fields may be separated by runs of spaces or
// tabs and lines may end in CRLF when parsing; writing is canonical.
EmbeddingTable parse_embedding_file(std::string_view text);
std::string write_embedding_file(const EmbeddingTable& table);

EmbeddingTable read_embedding_file(const std::string& path);
void save_embedding_file(const EmbeddingTable& table, const std::string& path);

// Manual replacements for labels the embedding vocabulary lacks, keyed by
// the normalised label (lowercase, single spaces).
class SynonymMap {
public:
    void add(std::string_view label, std::string_view replacement);
    const std::string* find(std::string_view label) const;
    std::size_t size() const { return pairs_.size(); }

private:
    std::map<std::string, std::string, std::less<>> pairs_;
};

// One "<label>\t<replacement>" record per line; blank lines are skipped.
SynonymMap parse_synonym_map(std::string_view text);

enum class LookupRule { kDirect, kConstituentSum };

struct LookupResult {
    std::vector<double> vector;
    LookupRule rule = LookupRule::kDirect;
    // Table keys actually used (one for a direct hit, one per word otherwise).
    std::vector<std::string> keys;
    // Synonym substitutions applied, in order.
    std::vector<std::string> synonyms_used;
};

std::string_view to_string(LookupRule rule);

// Lowercases, trims and collapses internal whitespace to single spaces.
std::string normalize_label(std::string_view label);

// Resolution cascade:
//   1. lowercase label with spaces joined by '_' found directly;
//   2. multi-word label whose words all resolve: (v1 + ... + vn) / sqrt(n);
//   3. otherwise the synonym map replacement, resolved again from step 1.
// Throws UnresolvedLabelError when the cascade ends without a vector.
LookupResult lookup_label(std::string_view label, const EmbeddingTable& table,
                          const SynonymMap& synonyms);

class UnresolvedLabelError : public InputError {
public:
    UnresolvedLabelError(std::string label, std::string stimulus_id = {});
    const std::string& label() const { return label_; }
    const std::string& stimulus_id() const { return stimulus_id_; }

private:
    std::string label_;
    std::string stimulus_id_;
};

// Stimulus identity plus whatever per-stimulus text is available.
struct StimulusSet {
    std::string dataset;
    std::vector<std::string> ids;
    std::vector<std::string> labels;  // empty, or one per id
};

// Labels CSV with header "stimulus_id,label".
StimulusSet parse_labels_csv(std::string_view text, std::string dataset = {});

struct StimulusEmbeddings {
    EmbeddingTable table;
    std::vector<LookupRule> rules;  // one per stimulus
};

// One vector per stimulus keyed by stimulus id. Throws UnresolvedLabelError
// carrying the offending stimulus id.
StimulusEmbeddings build_stimulus_embeddings(const StimulusSet& stimuli,
                                             const EmbeddingTable& table,
                                             const SynonymMap& synonyms);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace simjudge

#include "simjudge/embedding_store.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "simjudge/csv.hpp"
#include "simjudge/numfmt.hpp"

namespace simjudge {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InputError("embedding dimension must be positive");
}

void EmbeddingTable::add(std::string name, std::span<const double> vector) {
    if (name.empty()) throw InputError("embedding name must be non-empty");
    if (name.find_first_of(" \t\r\n") != std::string::npos) {
        throw InputError("embedding name contains whitespace: '" + name + "'");
    }
    if (vector.size() != dim_) {
        throw InputError("embedding '" + name + "' has " + std::to_string(vector.size()) +
                         " components, table dimension is " + std::to_string(dim_));
    }
    for (double v : vector) {
        if (!std::isfinite(v)) throw InputError("embedding '" + name + "' has a non-finite component");
    }
    if (index_.contains(name)) throw InputError("duplicate embedding name '" + name + "'");
    index_.emplace(name, names_.size());
    names_.push_back(std::move(name));
    values_.insert(values_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> EmbeddingTable::at(std::string_view name) const {
    const auto i = find(name);
    if (!i) throw InputError("no embedding named '" + std::string(name) + "'");
    return row(*i);
}

Eigen::MatrixXd EmbeddingTable::matrix() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t k = 0; k < dim_; ++k) m(i, k) = values_[i * dim_ + k];
    }
    return m;
}

EmbeddingTable EmbeddingTable::from_matrix(const std::vector<std::string>& names,
                                           const Eigen::MatrixXd& values) {
    if (static_cast<std::size_t>(values.rows()) != names.size()) {
        throw InputError("row count does not match name count");
    }
    EmbeddingTable table(static_cast<std::size_t>(values.cols()));
    std::vector<double> row(table.dim());
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = values(i, k);
        table.add(names[i], row);
    }
    return table;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::size_t parse_count(std::string_view token, const char* what) {
    std::size_t value = 0;
    for (char c : token) {
        if (c < '0' || c > '9') {
            throw InputError(std::string("embedding header: invalid ") + what + " '" +
                             std::string(token) + "'");
        }
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
}

}  // namespace

EmbeddingTable parse_embedding_file(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && split_fields(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw InputError("embedding file is empty");

    const auto header = split_fields(lines[0]);
    if (header.size() != 2) throw InputError("embedding header must be '<count> <dim>'");
    const std::size_t count = parse_count(header[0], "count");
    const std::size_t dim = parse_count(header[1], "dimension");
    if (dim == 0) throw InputError("embedding header: dimension must be positive");
    if (lines.size() - 1 != count) {
        throw InputError("embedding header declares " + std::to_string(count) + " rows, file has " +
                         std::to_string(lines.size() - 1));
    }

    EmbeddingTable table(dim);
    std::vector<double> vec(dim);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (fields.empty()) throw InputError("embedding line " + std::to_string(r + 1) + " is blank");
        if (fields.size() - 1 != dim) {
            throw InputError("embedding line " + std::to_string(r + 1) + " ('" +
                             std::string(fields[0]) + "'): dimension mismatch, expected " +
                             std::to_string(dim) + " values, found " +
                             std::to_string(fields.size() - 1));
        }
        for (std::size_t k = 0; k < dim; ++k) {
            try {
                vec[k] = parse_real(fields[k + 1]);
            } catch (const InputError& e) {
                throw InputError("embedding line " + std::to_string(r + 1) + ": " + e.what());
            }
        }
        table.add(std::string(fields[0]), vec);
    }
    return table;
}

std::string write_embedding_file(const EmbeddingTable& table) {
    std::string out;
    out += std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += table.name(i);
        for (double v : table.row(i)) {
            out.push_back(' ');
            out += format_real(v);
        }
        out.push_back('\n');
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for '" + path + "'");
}

EmbeddingTable read_embedding_file(const std::string& path) {
    try {
        return parse_embedding_file(read_text_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_embedding_file(const EmbeddingTable& table, const std::string& path) {
    write_text_file(path, write_embedding_file(table));
}

std::string normalize_label(std::string_view label) {
    std::string out;
    bool pending_space = false;
    for (char c : label) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c);
    }
    return out;
}

void SynonymMap::add(std::string_view label, std::string_view replacement) {
    auto key = normalize_label(label);
    auto value = normalize_label(replacement);
    if (key.empty() || value.empty()) throw InputError("synonym entries must be non-empty");
    pairs_[std::move(key)] = std::move(value);
}

const std::string* SynonymMap::find(std::string_view label) const {
    const auto it = pairs_.find(normalize_label(label));
    return it == pairs_.end() ? nullptr : &it->second;
}

SynonymMap parse_synonym_map(std::string_view text) {
    SynonymMap map;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (normalize_label(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw InputError("synonym map line " + std::to_string(line_no) +
                             ": expected '<label>\\t<replacement>'");
        }
        map.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return map;
}

std::string_view to_string(LookupRule rule) {
    switch (rule) {
        case LookupRule::kDirect: return "direct";
        case LookupRule::kConstituentSum: return "constituent_sum";
    }
    return "unknown";
}

UnresolvedLabelError::UnresolvedLabelError(std::string label, std::string stimulus_id)
    : InputError(stimulus_id.empty()
                     ? "unresolvable label '" + label + "'; add it to the synonym map"
                     : "stimulus '" + stimulus_id + "': unresolvable label '" + label +
                           "'; add it to the synonym map"),
      label_(std::move(label)),
      stimulus_id_(std::move(stimulus_id)) {}

LookupResult lookup_label(std::string_view label, const EmbeddingTable& table,
                          const SynonymMap& synonyms) {
    const std::string original = normalize_label(label);
    if (original.empty()) throw InputError("label is empty");

    LookupResult result;
    std::set<std::string> visited;
    std::string current = original;
    while (visited.insert(current).second) {
        std::vector<std::string> words;
        std::istringstream ws(current);
        for (std::string w; ws >> w;) words.push_back(w);

        std::string joined;
        for (const auto& w : words) joined += (joined.empty() ? "" : "_") + w;
        if (const auto hit = table.find(joined)) {
            const auto row = table.row(*hit);
            result.vector.assign(row.begin(), row.end());
            result.rule = LookupRule::kDirect;
            result.keys = {joined};
            return result;
        }

        if (words.size() > 1) {
            std::vector<double> sum(table.dim(), 0.0);
            bool all = true;
            for (const auto& w : words) {
                const auto hit = table.find(w);
                if (!hit) {
                    all = false;
                    break;
                }
                const auto row = table.row(*hit);
                for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += row[k];
            }
            if (all) {
                const double scale = 1.0 / std::sqrt(static_cast<double>(words.size()));
                for (auto& v : sum) v *= scale;
                result.vector = std::move(sum);
                result.rule = LookupRule::kConstituentSum;
                result.keys = words;
                return result;
            }
        }

        const std::string* replacement = synonyms.find(current);
        if (!replacement) break;
        result.synonyms_used.push_back(*replacement);
        current = *replacement;
    }
    throw UnresolvedLabelError(original);
}

StimulusSet parse_labels_csv(std::string_view text, std::string dataset) {
    const auto table = csv::parse(text);
    StimulusSet set;
    set.dataset = std::move(dataset);
    if (table.header.empty()) return set;
    const auto cols = csv::require_columns(table.header, {"stimulus_id", "label"});
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& id = table.rows[r][cols[0]];
        const auto& label = table.rows[r][cols[1]];
        if (id.empty()) {
            throw InputError("labels line " + std::to_string(table.lines[r]) + ": empty stimulus_id");
        }
        if (!seen.insert(id).second) throw InputError("duplicate stimulus_id '" + id + "'");
        if (normalize_label(label).empty()) {
            throw InputError("labels line " + std::to_string(table.lines[r]) + ": empty label");
        }
        set.ids.push_back(id);
        set.labels.push_back(label);
    }
    return set;
}

StimulusEmbeddings build_stimulus_embeddings(const StimulusSet& stimuli,
                                             const EmbeddingTable& table,
                                             const SynonymMap& synonyms) {
    if (stimuli.labels.size() != stimuli.ids.size()) {
        throw InputError("every stimulus needs a label");
    }
    StimulusEmbeddings out{EmbeddingTable(table.dim()), {}};
    for (std::size_t i = 0; i < stimuli.ids.size(); ++i) {
        LookupResult r;
        try {
            r = lookup_label(stimuli.labels[i], table, synonyms);
        } catch (const UnresolvedLabelError& e) {
            throw UnresolvedLabelError(e.label(), stimuli.ids[i]);
        }
        out.table.add(stimuli.ids[i], r.vector);
        out.rules.push_back(r.rule);
    }
    return out;
}

}  // namespace simjudge

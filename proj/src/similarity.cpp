#include "simjudge/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "simjudge/csv.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/numfmt.hpp"
#include "simjudge/ridge.hpp"

namespace simjudge {

void SimilarityMatrix::validate() const {
    const auto n = static_cast<Eigen::Index>(ids.size());
    if (values.rows() != n || values.cols() != n) {
        throw InputError("similarity matrix must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(values(i, j))) throw InputError("similarity matrix has a non-finite entry");
            if (j > i && std::abs(values(i, j) - values(j, i)) > 1e-9) {
                throw InputError("similarity matrix is not symmetric at (" + ids[i] + ", " +
                                 ids[j] + ")");
            }
        }
    }
}

std::vector<PairIndex> all_pairs(std::size_t n) {
    std::vector<PairIndex> pairs;
    pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    }
    return pairs;
}

std::vector<double> upper_triangle(const SimilarityMatrix& m) {
    std::vector<double> out;
    const auto n = m.size();
    out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(m.values(i, j));
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("cosine: vector lengths differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) throw NumericError("cosine: zero-norm vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double bilinear_similarity(std::span<const double> a, std::span<const double> b,
                           const RidgeModel& model) {
    if (a.size() != b.size() || a.size() != model.feature_dim()) {
        throw InputError("bilinear similarity: dimension mismatch");
    }
    double s = model.intercept;
    for (std::size_t k = 0; k < a.size(); ++k) s += model.weights[k] * a[k] * b[k];
    return s;
}

EmbeddingTable unit_normalize(const EmbeddingTable& table) {
    EmbeddingTable out(table.dim());
    std::vector<double> row(table.dim());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto src = table.row(i);
        double norm = 0.0;
        for (double v : src) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw NumericError("embedding '" + table.name(i) + "' has zero norm");
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = src[k] / norm;
        out.add(table.name(i), row);
    }
    return out;
}

namespace {

template <typename PairFn, typename SelfFn>
SimilarityMatrix assemble(const EmbeddingTable& embs, PairFn pair, SelfFn self) {
    const auto n = embs.size();
    if (n < 2) throw InputError("similarity matrix needs at least 2 stimuli");
    SimilarityMatrix m{embs.names(), Eigen::MatrixXd(n, n), MatrixKind::kPredicted};
    for (std::size_t i = 0; i < n; ++i) {
        m.values(i, i) = self(embs.row(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = pair(embs.row(i), embs.row(j));
            m.values(i, j) = s;
            m.values(j, i) = s;
        }
    }
    return m;
}

}  // namespace

SimilarityMatrix cosine_matrix(const EmbeddingTable& embs) {
    return assemble(
        embs, [](auto a, auto b) { return cosine(a, b); },
        [](auto a) {
            cosine(a, a);  // rejects zero rows
            return 1.0;
        });
}

SimilarityMatrix fitted_matrix(const EmbeddingTable& embs, const RidgeModel& model) {
    const EmbeddingTable z = model.unit_normalized ? unit_normalize(embs) : embs;
    return assemble(
        z, [&](auto a, auto b) { return bilinear_similarity(a, b, model); },
        [&](auto a) { return bilinear_similarity(a, a, model); });
}

Eigen::MatrixXd to_dissimilarity(const SimilarityMatrix& sim) {
    const auto n = static_cast<Eigen::Index>(sim.size());
    if (n < 2) throw InputError("dissimilarity needs at least 2 stimuli");
    double s_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) s_max = std::max(s_max, sim.values(i, j));
        }
    }
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            // symmetric by construction even if the input is only 1e-9 symmetric
            const double v = s_max - 0.5 * (sim.values(i, j) + sim.values(j, i));
            d(i, j) = d(j, i) = std::max(v, 0.0);
        }
    }
    return d;
}

EmbeddingTable normalize_concat(std::span<const EmbeddingTable> tables) {
    if (tables.size() < 2) throw InputError("normalize_concat needs at least 2 tables");
    const auto& ids = tables[0].names();
    const std::set<std::string> id_set(ids.begin(), ids.end());
    if (ids.size() < 2) throw InputError("normalize_concat: std is undefined for a single stimulus");
    std::size_t total = 0;
    for (const auto& t : tables) {
        if (t.size() != ids.size() ||
            std::set<std::string>(t.names().begin(), t.names().end()) != id_set) {
            throw InputError("normalize_concat: tables cover different stimulus ids");
        }
        total += t.dim();
    }

    const auto n = static_cast<Eigen::Index>(ids.size());
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(total));
    Eigen::Index offset = 0;
    for (const auto& t : tables) {
        Eigen::MatrixXd block = align_to(t, ids).matrix();
        for (Eigen::Index k = 0; k < block.cols(); ++k) {
            auto col = block.col(k);
            const double mean = col.mean();
            col.array() -= mean;
            const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
            if (sd < 1e-12) {
                col.setZero();
            } else {
                col /= sd;
            }
        }
        out.middleCols(offset, block.cols()) = block;
        offset += block.cols();
    }
    return EmbeddingTable::from_matrix(ids, out);
}

EmbeddingTable align_to(const EmbeddingTable& embs, const std::vector<std::string>& ids) {
    EmbeddingTable out(embs.dim());
    for (const auto& id : ids) {
        const auto i = embs.find(id);
        if (!i) throw InputError("no embedding for stimulus '" + id + "'");
        out.add(id, embs.row(*i));
    }
    return out;
}

SimilarityMatrix parse_similarity_csv(std::string_view text, MatrixKind kind) {
    const auto table = csv::parse(text);
    if (table.header.empty() || table.header[0] != "id") {
        throw InputError("similarity CSV must start with header 'id,<ids...>'");
    }
    SimilarityMatrix m;
    m.kind = kind;
    m.ids.assign(table.header.begin() + 1, table.header.end());
    const auto n = m.ids.size();
    if (table.rows.size() != n) {
        throw InputError("similarity CSV is not square: " + std::to_string(n) + " columns, " +
                         std::to_string(table.rows.size()) + " rows");
    }
    if (std::set<std::string>(m.ids.begin(), m.ids.end()).size() != n) {
        throw InputError("similarity CSV has duplicate ids");
    }
    m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        if (row[0] != m.ids[r]) {
            throw InputError("similarity CSV row " + std::to_string(r + 1) + " is '" + row[0] +
                             "', expected '" + m.ids[r] + "'");
        }
        for (std::size_t c = 0; c < n; ++c) m.values(r, c) = parse_real(row[c + 1]);
    }
    m.validate();
    return m;
}

std::string write_similarity_csv(const SimilarityMatrix& m) {
    std::vector<std::string> fields{"id"};
    fields.insert(fields.end(), m.ids.begin(), m.ids.end());
    std::string out = csv::join_row(fields) + "\n";
    for (std::size_t r = 0; r < m.size(); ++r) {
        out += csv::escape(m.ids[r]);
        for (std::size_t c = 0; c < m.size(); ++c) {
            out.push_back(',');
            out += format_real(m.values(r, c));
        }
        out.push_back('\n');
    }
    return out;
}

SimilarityMatrix read_similarity_csv(const std::string& path, MatrixKind kind) {
    try {
        return parse_similarity_csv(read_text_file(path), kind);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace simjudge

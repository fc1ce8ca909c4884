#include "simjudge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "simjudge/csv.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/numfmt.hpp"
#include "simjudge/parallel.hpp"
#include "simjudge/rng.hpp"

namespace simjudge {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696eULL;

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

MethodScore score(std::span<const double> pred, std::span<const double> truth) {
    const double r = pearson_r(pred, truth);
    return {r * r, r};
}

// Row of pair (i, j) in all_pairs(n) order.
std::size_t pair_row(std::size_t n, PairIndex p) {
    return p.i * n - p.i * (p.i + 1) / 2 + (p.j - p.i - 1);
}

void check_inputs(const EmbeddingTable& embs, const SimilarityMatrix& human, const FoldPlan& plan) {
    if (plan.n_images != human.size()) {
        throw InputError("fold plan covers " + std::to_string(plan.n_images) +
                         " images, human matrix has " + std::to_string(human.size()));
    }
    if (embs.size() != human.size()) {
        throw InputError("embeddings cover " + std::to_string(embs.size()) +
                         " stimuli, human matrix has " + std::to_string(human.size()));
    }
}

struct FoldOutcome {
    FoldResult result;
    std::vector<PairIndex> pairs;
    Eigen::VectorXd predictions;
};

FoldOutcome run_fold(const PairDesign& full, std::size_t n, const FoldPlan& plan, std::size_t fold,
                     const EvalOptions& options) {
    const auto split = ccv_split(plan, fold);
    std::vector<std::size_t> train_rows, val_rows;
    train_rows.reserve(split.train.size());
    for (const auto& p : split.train) train_rows.push_back(pair_row(n, p));
    for (const auto& p : split.validation) val_rows.push_back(pair_row(n, p));
    const auto train = full.subset(train_rows);
    const auto val = full.subset(val_rows);

    FoldOutcome out;
    auto& r = out.result;
    r.fold = fold;
    r.train_pairs = train.size();
    r.validation_pairs = val.size();
    r.alpha = select_alpha(train, options.alphas, options.inner_folds,
                           derive_seed(options.seed, stream::kFolds, fold + 1), options.ridge)
                  .alpha;
    r.model = fit_ridge(train, r.alpha, options.ridge);
    out.predictions = predict(val, r.model);
    try {
        r.r2 = pearson_r2(as_span(out.predictions), as_span(val.targets));
    } catch (const NumericError&) {
        r.r2.reset();
    }
    out.pairs = split.validation;
    return out;
}

void pool_folds(EvalEntry& entry, std::vector<FoldOutcome>& outcomes, const SimilarityMatrix& human) {
    std::vector<double> truth;
    for (auto& o : outcomes) {
        for (std::size_t k = 0; k < o.pairs.size(); ++k) {
            entry.ccv_pairs.push_back(o.pairs[k]);
            entry.ccv_predictions.push_back(o.predictions[static_cast<Eigen::Index>(k)]);
            truth.push_back(human.values(o.pairs[k].i, o.pairs[k].j));
        }
        entry.folds.push_back(std::move(o.result));
    }
    entry.lt_ccv = score(entry.ccv_predictions, truth);
}

}  // namespace

EvalEntry evaluate_model(std::string name, const EmbeddingTable& source,
                         const SimilarityMatrix& human, const FoldPlan& plan,
                         const EvalOptions& options) {
    const auto embs = align_to(source, human.ids);
    check_inputs(embs, human, plan);
    const auto n = human.size();
    const auto pairs = all_pairs(n);
    const auto truth = upper_triangle(human);

    EvalEntry entry;
    entry.model = std::move(name);
    entry.feature_dim = embs.dim();

    entry.raw = score(upper_triangle(cosine_matrix(embs)), truth);

    const auto full = build_pair_design(embs, human, pairs, options.features);
    const auto train_alpha = select_alpha(full, options.alphas, options.inner_folds,
                                          derive_seed(options.seed, kTrainStream), options.ridge);
    entry.train_model = fit_ridge(full, train_alpha.alpha, options.ridge);
    entry.lt_train = score(as_span(predict(full, entry.train_model)), truth);

    std::vector<FoldOutcome> outcomes(plan.k_folds);
    parallel_for(plan.k_folds, options.jobs,
                 [&](std::size_t f) { outcomes[f] = run_fold(full, n, plan, f, options); });
    pool_folds(entry, outcomes, human);
    return entry;
}

EvalEntry select_layer(std::string name, std::span<const EmbeddingTable> layers,
                       const SimilarityMatrix& human, const FoldPlan& plan,
                       const EvalOptions& options) {
    if (layers.empty()) throw InputError("layer selection needs at least one layer");
    std::vector<EvalEntry> entries;
    entries.reserve(layers.size());
    for (const auto& layer : layers) entries.push_back(evaluate_model(name, layer, human, plan, options));
    std::size_t best = 0;
    std::vector<double> scores;
    for (std::size_t l = 0; l < entries.size(); ++l) {
        scores.push_back(entries[l].lt_ccv.r2);
        if (entries[l].lt_ccv.r2 > entries[best].lt_ccv.r2) best = l;
    }
    EvalEntry out = std::move(entries[best]);
    out.layer = best;
    out.layer_scores = std::move(scores);
    out.layer_mode = "post_hoc";
    return out;
}

EvalEntry select_layer_nested(std::string name, std::span<const EmbeddingTable> layers,
                              const SimilarityMatrix& human, const FoldPlan& plan,
                              const EvalOptions& options) {
    if (layers.empty()) throw InputError("layer selection needs at least one layer");
    const auto n = human.size();
    const auto pairs = all_pairs(n);

    std::vector<PairDesign> designs;
    for (const auto& layer : layers) {
        const auto embs = align_to(layer, human.ids);
        check_inputs(embs, human, plan);
        designs.push_back(build_pair_design(embs, human, pairs, options.features));
    }

    std::vector<FoldOutcome> outcomes(plan.k_folds);
    parallel_for(plan.k_folds, options.jobs, [&](std::size_t f) {
        const auto split = ccv_split(plan, f);
        std::vector<std::size_t> train_rows;
        for (const auto& p : split.train) train_rows.push_back(pair_row(n, p));
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < designs.size(); ++l) {
            const auto sel = select_alpha(designs[l].subset(train_rows), options.alphas,
                                          options.inner_folds,
                                          derive_seed(options.seed, stream::kFolds, f + 1),
                                          options.ridge);
            const double s = sel.mean_r2.empty() ? 0.0
                                                 : *std::max_element(sel.mean_r2.begin(), sel.mean_r2.end());
            if (s > best_score) {
                best_score = s;
                best = l;
            }
        }
        outcomes[f] = run_fold(designs[best], n, plan, f, options);
        outcomes[f].result.layer = best;
    });

    std::vector<std::size_t> votes(layers.size(), 0);
    for (const auto& o : outcomes) ++votes[*o.result.layer];
    const auto modal = static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());

    EvalEntry out = evaluate_model(std::move(name), layers[modal], human, plan,
                                   EvalOptions{options.alphas, options.inner_folds, options.seed,
                                               options.features, options.ridge, options.jobs});
    out.folds.clear();
    out.ccv_pairs.clear();
    out.ccv_predictions.clear();
    pool_folds(out, outcomes, human);
    out.layer = modal;
    out.layer_mode = "nested";
    return out;
}

SimilarityMatrix ccv_prediction_matrix(const EvalEntry& entry,
                                       std::span<const EmbeddingTable> tables,
                                       const SimilarityMatrix& human, const FoldPlan& plan) {
    if (entry.folds.size() != plan.k_folds) throw InputError("entry does not match the fold plan");
    const auto n = human.size();
    std::vector<Eigen::MatrixXd> z;
    for (const auto& fold : entry.folds) {
        std::size_t which = 0;
        if (tables.size() > 1) which = fold.layer.value_or(entry.layer.value_or(0));
        if (which >= tables.size()) throw InputError("layer index out of range");
        auto aligned = align_to(tables[which], human.ids);
        if (fold.model.unit_normalized) aligned = unit_normalize(aligned);
        z.push_back(aligned.matrix());
    }
    auto sim = [&](std::size_t f, std::size_t i, std::size_t j) {
        return entry.folds[f].model.intercept +
               (z[f].row(i).array() * z[f].row(j).array()).matrix().dot(entry.folds[f].model.weights);
    };
    SimilarityMatrix m{human.ids, Eigen::MatrixXd(n, n), MatrixKind::kPredicted};
    for (std::size_t i = 0; i < n; ++i) {
        const auto fi = plan.assignment[i];
        m.values(i, i) = sim(fi, i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto fj = plan.assignment[j];
            const double v = fi == fj ? sim(fi, i, j) : 0.5 * (sim(fi, i, j) + sim(fj, i, j));
            m.values(i, j) = m.values(j, i) = v;
        }
    }
    return m;
}

namespace {

nlohmann::ordered_json model_json(const RidgeModel& m) {
    nlohmann::ordered_json j;
    j["alpha"] = m.alpha;
    j["intercept"] = m.intercept;
    j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
    j["feature_dim"] = m.feature_dim();
    j["normalization"] = m.unit_normalized;
    return j;
}

RidgeModel model_from(const nlohmann::json& j) { return model_from_json(j.dump()); }

nlohmann::ordered_json score_json(const MethodScore& s) {
    return {{"r2", s.r2}, {"r", s.r}};
}

MethodScore score_from(const nlohmann::json& j) {
    return {j.at("r2").get<double>(), j.at("r").get<double>()};
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["dataset"] = report.dataset;
    j["k_folds"] = report.k_folds;
    j["seed"] = report.seed;
    j["alphas"] = report.alphas;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json je;
        je["model"] = e.model;
        je["feature_dim"] = e.feature_dim;
        je["Raw"] = score_json(e.raw);
        je["LT-Train"] = score_json(e.lt_train);
        je["LT-Train"]["alpha"] = e.train_model.alpha;
        je["LT-CCV"] = score_json(e.lt_ccv);
        std::size_t pooled = 0;
        for (const auto& f : e.folds) pooled += f.validation_pairs;
        je["LT-CCV"]["pooled_pairs"] = pooled;
        auto folds = nlohmann::ordered_json::array();
        for (const auto& f : e.folds) {
            nlohmann::ordered_json jf;
            jf["fold"] = f.fold;
            jf["alpha"] = f.alpha;
            jf["r2"] = f.r2 ? nlohmann::ordered_json(*f.r2) : nlohmann::ordered_json(nullptr);
            jf["train_pairs"] = f.train_pairs;
            jf["validation_pairs"] = f.validation_pairs;
            if (f.layer) jf["layer"] = *f.layer;
            folds.push_back(std::move(jf));
        }
        je["LT-CCV"]["folds"] = std::move(folds);
        if (e.layer) {
            je["layer"] = *e.layer;
            je["layer_mode"] = e.layer_mode;
            je["layer_scores"] = e.layer_scores;
        }
        je["train_model"] = model_json(e.train_model);
        auto fold_models = nlohmann::ordered_json::array();
        for (const auto& f : e.folds) fold_models.push_back(model_json(f.model));
        je["fold_models"] = std::move(fold_models);
        j["entries"].push_back(std::move(je));
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        r.dataset = j.at("dataset").get<std::string>();
        r.k_folds = j.value("k_folds", kDefaultFolds);
        r.seed = j.value("seed", std::uint64_t{0});
        r.alphas = j.value("alphas", std::vector<double>{});
        for (const auto& je : j.at("entries")) {
            EvalEntry e;
            e.model = je.at("model").get<std::string>();
            e.feature_dim = je.value("feature_dim", std::size_t{0});
            e.raw = score_from(je.at("Raw"));
            e.lt_train = score_from(je.at("LT-Train"));
            e.lt_ccv = score_from(je.at("LT-CCV"));
            if (je.contains("train_model")) e.train_model = model_from(je["train_model"]);
            const auto& jfolds = je.at("LT-CCV").value("folds", nlohmann::json::array());
            for (std::size_t k = 0; k < jfolds.size(); ++k) {
                FoldResult f;
                f.fold = jfolds[k].at("fold").get<std::size_t>();
                f.alpha = jfolds[k].at("alpha").get<double>();
                if (!jfolds[k].at("r2").is_null()) f.r2 = jfolds[k]["r2"].get<double>();
                f.train_pairs = jfolds[k].value("train_pairs", std::size_t{0});
                f.validation_pairs = jfolds[k].value("validation_pairs", std::size_t{0});
                if (jfolds[k].contains("layer")) f.layer = jfolds[k]["layer"].get<std::size_t>();
                if (je.contains("fold_models") && k < je["fold_models"].size()) {
                    f.model = model_from(je["fold_models"][k]);
                }
                e.folds.push_back(std::move(f));
            }
            if (je.contains("layer")) {
                e.layer = je["layer"].get<std::size_t>();
                e.layer_mode = je.value("layer_mode", std::string{});
                e.layer_scores = je.value("layer_scores", std::vector<double>{});
            }
            r.entries.push_back(std::move(e));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report JSON: ") + e.what());
    }
}

namespace {

std::vector<double> zscore(const std::vector<double>& v, const char* what) {
    const auto n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0)) throw NumericError(std::string("discrepancy ranking: zero variance in ") + what);
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = (v[k] - mean) / sd;
    return out;
}

}  // namespace

std::vector<Discrepancy> rank_discrepancies(const SimilarityMatrix& a, const SimilarityMatrix& b,
                                            const SimilarityMatrix& human, std::size_t top_k) {
    if (a.ids != b.ids || a.ids != human.ids) {
        throw InputError("discrepancy ranking: matrices list different stimuli");
    }
    if (a.size() < 2) throw InputError("discrepancy ranking needs at least 2 stimuli");
    const auto za = zscore(upper_triangle(a), "prediction A");
    const auto zb = zscore(upper_triangle(b), "prediction B");
    const auto zh = zscore(upper_triangle(human), "human matrix");
    const auto pairs = all_pairs(a.size());

    std::vector<Discrepancy> rows;
    rows.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        rows.push_back({pairs[k], a.ids[pairs[k].i], a.ids[pairs[k].j], za[k], zb[k], zh[k],
                        std::abs(za[k] - zb[k])});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Discrepancy& x, const Discrepancy& y) { return x.gap > y.gap; });
    if (top_k > 0 && top_k < rows.size()) rows.resize(top_k);
    return rows;
}

std::string discrepancies_to_csv(const std::vector<Discrepancy>& rows) {
    std::string out = "rank,stimulus_i,stimulus_j,z_a,z_b,z_human,gap\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        out += std::to_string(k + 1) + "," + csv::escape(r.id_i) + "," + csv::escape(r.id_j) + "," +
               format_real(r.z_a) + "," + format_real(r.z_b) + "," + format_real(r.z_human) + "," +
               format_real(r.gap) + "\n";
    }
    return out;
}

}  // namespace simjudge

#include "simjudge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>

#include "simjudge/corpus_qc.hpp"
#include "simjudge/csv.hpp"
#include "simjudge/embedding_store.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/evaluation.hpp"
#include "simjudge/label_encoder.hpp"
#include "simjudge/numfmt.hpp"
#include "simjudge/report.hpp"
#include "simjudge/similarity.hpp"

namespace fs = std::filesystem;

namespace simjudge {

namespace {

std::string resolve(const std::string& path, const std::string& base) {
    if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base) / path).lexically_normal().string();
}

// Collects outputs and writes them in one pass at the end of a command.
class OutputSet {
public:
    void add(std::string relative, std::string content) {
        files_.emplace_back(std::move(relative), std::move(content));
    }

    CommandResult commit(const std::string& out_dir, std::string summary) {
        CommandResult result;
        for (const auto& [rel, content] : files_) {
            const fs::path target = fs::path(out_dir) / rel;
            std::error_code ec;
            fs::create_directories(target.parent_path(), ec);
            if (ec) throw InputError("cannot create directory '" + target.parent_path().string() + "'");
            write_text_file(target.string(), content);
            result.written.push_back(rel);
        }
        result.summary = std::move(summary);
        return result;
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string slug(const std::string& name) {
    std::string out;
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            out.push_back(static_cast<char>(std::tolower(u)));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "model" : out;
}

std::string require_path(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string("missing input: ") + what);
    return path;
}

// Provenance lines are attached to JSON outputs and collected in
// provenance.json; formats with a fixed layout (CSV, embedding files) stay
// untouched.
void add_manifest(OutputSet& out, const PipelineConfig& config, const std::string& command,
                  const std::vector<std::string>& files) {
    auto j = provenance(config, command);
    j["outputs"] = files;
    j["config"] = config_to_json(config);
    out.add("provenance_" + command + ".json", dump(j));
}

EvalOptions eval_options(const PipelineConfig& config) {
    EvalOptions o;
    if (!config.alphas.empty()) o.alphas = config.alphas;
    o.inner_folds = config.inner_folds;
    o.seed = config.seed;
    o.features.unit_normalize = config.unit_normalize;
    o.ridge.fit_intercept = config.fit_intercept;
    o.ridge.standardize = config.standardize_features;
    o.jobs = config.jobs;
    return o;
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
    PipelineConfig c;
    try {
        auto path = [&](const char* key, std::string& field) {
            if (j.contains(key)) field = resolve(j[key].get<std::string>(), base_dir);
        };
        c.dataset = j.value("dataset", c.dataset);
        path("labels", c.labels);
        path("descriptions", c.descriptions);
        path("word_embeddings", c.word_embeddings);
        path("synonyms", c.synonyms);
        path("human_matrix", c.human_matrix);
        if (j.contains("sources")) {
            for (const auto& s : j["sources"]) {
                c.sources.push_back({s.at("name").get<std::string>(),
                                     resolve(s.at("path").get<std::string>(), base_dir)});
            }
        }
        c.layers_name = j.value("layers_name", c.layers_name);
        if (j.contains("sentence_layers")) {
            for (const auto& p : j["sentence_layers"]) {
                c.sentence_layers.push_back(resolve(p.get<std::string>(), base_dir));
            }
        }
        c.k_folds = j.value("k_folds", c.k_folds);
        c.seed = j.value("seed", c.seed);
        c.alphas = j.value("alphas", c.alphas);
        c.inner_folds = j.value("inner_folds", c.inner_folds);
        c.layer_selection = j.value("layer_selection", c.layer_selection);
        c.unit_normalize = j.value("unit_normalize", c.unit_normalize);
        c.standardize_features = j.value("standardize_features", c.standardize_features);
        c.fit_intercept = j.value("fit_intercept", c.fit_intercept);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.repetition_threshold = j.value("repetition_threshold", c.repetition_threshold);
        c.min_trials = j.value("min_trials", c.min_trials);
        c.min_chars = j.value("min_chars", c.min_chars);
        if (j.contains("mds")) {
            const auto& m = j["mds"];
            c.mds.dim = m.value("dim", c.mds.dim);
            c.mds.restarts = m.value("restarts", c.mds.restarts);
            c.mds.max_iter = m.value("max_iter", c.mds.max_iter);
            c.mds.tol = m.value("tol", c.mds.tol);
        }
        c.top_k = j.value("top_k", c.top_k);
        c.jobs = j.value("jobs", c.jobs);
        if (j.contains("out_dir")) c.out_dir = resolve(j["out_dir"].get<std::string>(), base_dir);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (c.k_folds < 2) throw InputError("config: k_folds must be at least 2");
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) throw InputError("config: epsilon must be in [0, 1)");
    if (c.layer_selection != "post_hoc" && c.layer_selection != "nested") {
        throw InputError("config: layer_selection must be 'post_hoc' or 'nested'");
    }
    return c;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["dataset"] = c.dataset;
    j["labels"] = c.labels;
    j["descriptions"] = c.descriptions;
    j["word_embeddings"] = c.word_embeddings;
    j["synonyms"] = c.synonyms;
    j["human_matrix"] = c.human_matrix;
    j["sources"] = nlohmann::ordered_json::array();
    for (const auto& s : c.sources) j["sources"].push_back({{"name", s.name}, {"path", s.path}});
    j["layers_name"] = c.layers_name;
    j["sentence_layers"] = c.sentence_layers;
    j["k_folds"] = c.k_folds;
    j["seed"] = c.seed;
    j["alphas"] = c.alphas;
    j["inner_folds"] = c.inner_folds;
    j["layer_selection"] = c.layer_selection;
    j["unit_normalize"] = c.unit_normalize;
    j["standardize_features"] = c.standardize_features;
    j["fit_intercept"] = c.fit_intercept;
    j["epsilon"] = c.epsilon;
    j["repetition_threshold"] = c.repetition_threshold;
    j["min_trials"] = c.min_trials;
    j["min_chars"] = c.min_chars;
    j["mds"] = {{"dim", c.mds.dim},
                {"restarts", c.mds.restarts},
                {"max_iter", c.mds.max_iter},
                {"tol", c.mds.tol}};
    j["top_k"] = c.top_k;
    return j;
}

PipelineConfig load_config(const std::string& path) {
    const auto text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return config_from_json(j, fs::path(path).parent_path().string());
}

std::string config_hash(const PipelineConfig& config) {
    const auto text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::ordered_json provenance(const PipelineConfig& config, const std::string& command) {
    nlohmann::ordered_json j;
    j["tool"] = "simjudge";
    j["version"] = SIMJUDGE_VERSION;
    j["command"] = command;
    j["config_hash"] = config_hash(config);
    j["seed"] = config.seed;
    return j;
}

CommandResult cmd_qc(const PipelineConfig& config) {
    const auto records =
        parse_descriptions_csv(read_text_file(require_path(config.descriptions, "descriptions CSV")));
    ValidationOptions validation;
    validation.min_chars = config.min_chars;
    ScreenOptions screen{config.repetition_threshold, config.min_trials};
    const auto report = run_qc(records, validation, screen);

    auto report_json = nlohmann::ordered_json::parse(qc_report_to_json(report));
    report_json["provenance"] = provenance(config, "qc");

    const auto accepted = report.accepted();
    std::vector<std::string> images;
    for (const auto& [image, _] : report.accepted_per_image) images.push_back(image);
    const auto pooled = pool_descriptions(accepted, images);
    nlohmann::ordered_json pooled_json;
    pooled_json["images"] = nlohmann::ordered_json::object();
    for (const auto& [image, texts] : pooled.texts) pooled_json["images"][image] = texts;
    pooled_json["empty_images"] = pooled.empty_images;
    pooled_json["provenance"] = provenance(config, "qc");

    OutputSet out;
    out.add("qc_report.json", dump(report_json));
    out.add("filtered_descriptions.csv", write_descriptions_csv(accepted));
    out.add("pooled_descriptions.json", dump(pooled_json));
    add_manifest(out, config, "qc", {"qc_report.json", "filtered_descriptions.csv", "pooled_descriptions.json"});

    std::size_t excluded = 0;
    for (const auto& p : report.participants) excluded += p.excluded ? 1 : 0;
    auto result = out.commit(config.out_dir, std::to_string(accepted.size()) + " of " +
                                                 std::to_string(records.size()) + " descriptions accepted, " +
                                                 std::to_string(excluded) + " participant(s) excluded");
    if (!pooled.empty_images.empty()) {
        result.warnings.push_back(std::to_string(pooled.empty_images.size()) +
                                  " image(s) have no accepted description");
    }
    return result;
}

EncodeSource parse_encode_source(const std::string& name) {
    if (name == "onehot") return EncodeSource::kOneHot;
    if (name == "smoothed-onehot") return EncodeSource::kSmoothedOneHot;
    if (name == "word-embedding") return EncodeSource::kWordEmbedding;
    throw InputError("unknown encode source '" + name + "' (onehot, smoothed-onehot, word-embedding)");
}

CommandResult cmd_encode(const PipelineConfig& config, EncodeSource source, const std::string& output_name) {
    const auto stimuli = parse_labels_csv(read_text_file(require_path(config.labels, "labels CSV")),
                                          config.dataset);
    OutputSet out;
    std::vector<std::string> warnings;
    std::string file;
    std::vector<std::string> files;
    std::size_t dim = 0;
    if (source == EncodeSource::kWordEmbedding) {
        const auto table = read_embedding_file(require_path(config.word_embeddings, "word embedding table"));
        SynonymMap synonyms;
        if (!config.synonyms.empty()) synonyms = parse_synonym_map(read_text_file(config.synonyms));
        const auto built = build_stimulus_embeddings(stimuli, table, synonyms);
        file = output_name.empty() ? "word_embedding.txt" : output_name;
        out.add(file, write_embedding_file(built.table));
        nlohmann::ordered_json log;
        log["provenance"] = provenance(config, "encode");
        log["stimuli"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < stimuli.ids.size(); ++i) {
            const auto r = lookup_label(stimuli.labels[i], table, synonyms);
            log["stimuli"].push_back({{"stimulus_id", stimuli.ids[i]},
                                      {"label", stimuli.labels[i]},
                                      {"rule", std::string(to_string(r.rule))},
                                      {"keys", r.keys},
                                      {"synonyms", r.synonyms_used}});
        }
        out.add("lookup_log.json", dump(log));
        files = {file, "lookup_log.json"};
        dim = built.table.dim();
    } else {
        const bool smoothed = source == EncodeSource::kSmoothedOneHot;
        const auto encoded = encode_labels(
            stimuli, smoothed ? LabelEncoding::kSmoothedOneHot : LabelEncoding::kOneHot, config.epsilon);
        if (smoothed && smoothing_degenerate(encoded.vocab.size(), config.epsilon)) {
            warnings.push_back("smoothing with epsilon " + format_real(config.epsilon) + " and k = " +
                               std::to_string(encoded.vocab.size()) +
                               " makes the hot component no larger than the cold ones");
        }
        file = output_name.empty() ? (smoothed ? "smoothed_onehot.txt" : "onehot.txt") : output_name;
        out.add(file, write_embedding_file(encoded.table));
        std::string vocab;
        for (const auto& c : encoded.vocab.classes()) vocab += c + "\n";
        out.add("vocabulary.txt", vocab);
        files = {file, "vocabulary.txt"};
        dim = encoded.table.dim();
    }
    add_manifest(out, config, "encode", files);
    auto result = out.commit(config.out_dir, "encoded " + std::to_string(stimuli.ids.size()) +
                                                 " stimuli into " + file + " (dim " +
                                                 std::to_string(dim) + ")");
    result.warnings = std::move(warnings);
    return result;
}

CommandResult cmd_combine(const PipelineConfig& config, const std::string& output_name) {
    std::vector<EmbeddingTable> tables;
    for (const auto& s : config.sources) tables.push_back(read_embedding_file(s.path));
    const auto combined = normalize_concat(tables);
    OutputSet out;
    out.add(output_name, write_embedding_file(combined));
    add_manifest(out, config, "combine", {output_name});
    return out.commit(config.out_dir, "combined " + std::to_string(tables.size()) + " tables into dim " +
                                          std::to_string(combined.dim()));
}

CommandResult cmd_fit_eval(const PipelineConfig& config) {
    const auto human = read_similarity_csv(require_path(config.human_matrix, "human similarity matrix"),
                                           MatrixKind::kHuman);
    if (config.sources.empty() && config.sentence_layers.empty()) {
        throw InputError("fit-eval needs at least one embedding source");
    }
    const auto plan = make_folds(human.size(), config.k_folds, config.seed);
    const auto options = eval_options(config);

    struct Evaluated {
        EvalEntry entry;
        std::vector<EmbeddingTable> tables;  // 1 table, or the layer list
    };
    std::vector<Evaluated> results;
    std::vector<std::pair<std::string, EmbeddingTable>> representations;

    for (const auto& s : config.sources) {
        auto table = align_to(read_embedding_file(s.path), human.ids);
        results.push_back({evaluate_model(s.name, table, human, plan, options), {table}});
        representations.emplace_back(s.name, std::move(table));
    }
    if (!config.sentence_layers.empty()) {
        std::vector<EmbeddingTable> layers;
        for (const auto& p : config.sentence_layers) layers.push_back(align_to(read_embedding_file(p), human.ids));
        auto entry = config.layer_selection == "nested"
                         ? select_layer_nested(config.layers_name, layers, human, plan, options)
                         : select_layer(config.layers_name, layers, human, plan, options);
        representations.emplace_back(config.layers_name, layers[*entry.layer]);
        results.push_back({std::move(entry), std::move(layers)});
    }
    if (representations.size() >= 2) {
        std::vector<EmbeddingTable> parts;
        std::string name;
        for (const auto& [n, t] : representations) {
            name += (name.empty() ? "" : " + ") + n;
            parts.push_back(t);
        }
        auto combined = normalize_concat(parts);
        results.push_back({evaluate_model(name, combined, human, plan, options), {combined}});
    }

    EvalReport report;
    report.dataset = config.dataset;
    report.k_folds = config.k_folds;
    report.seed = config.seed;
    report.alphas = options.alphas;
    for (const auto& r : results) report.entries.push_back(r.entry);

    OutputSet out;
    std::vector<std::string> files;
    auto add = [&](std::string rel, std::string content) {
        files.push_back(rel);
        out.add(std::move(rel), std::move(content));
    };

    auto report_json = report_to_json(report);
    report_json["fold_assignment"] = plan.assignment;
    report_json["provenance"] = provenance(config, "fit-eval");
    add("report.json", dump(report_json));
    add("report.md", render_markdown(scores_from_reports(std::span<const EvalReport>(&report, 1))));

    std::string summary;
    for (const auto& r : results) {
        const auto& e = r.entry;
        const auto s = slug(e.model);
        add("models/" + s + "_train.json", model_to_json(e.train_model));
        for (const auto& f : e.folds) {
            add("models/" + s + "_fold" + std::to_string(f.fold) + ".json", model_to_json(f.model));
        }
        add("predictions/" + s + "_ccv.csv",
            write_similarity_csv(ccv_prediction_matrix(e, r.tables, human, plan)));
        const auto& train_table = r.tables.size() == 1 ? r.tables[0] : r.tables[*e.layer];
        add("predictions/" + s + "_train.csv", write_similarity_csv(fitted_matrix(train_table, e.train_model)));
        char line[256];
        std::snprintf(line, sizeof line, "%s (feature_dim %zu): Raw %.3f, LT-Train %.3f, LT-CCV %.3f\n",
                      e.model.c_str(), e.feature_dim, e.raw.r2, e.lt_train.r2, e.lt_ccv.r2);
        summary += line;
    }
    add_manifest(out, config, "fit-eval", files);
    if (!summary.empty()) summary.pop_back();
    return out.commit(config.out_dir, summary);
}

CommandResult cmd_predict(const PipelineConfig& config, const std::string& embeddings,
                          const std::string& model, const std::string& output_name) {
    const auto table = read_embedding_file(require_path(embeddings, "embedding table"));
    SimilarityMatrix m;
    if (model.empty()) {
        m = cosine_matrix(table);
    } else {
        m = fitted_matrix(table, model_from_json(read_text_file(model)));
    }
    OutputSet out;
    out.add(output_name, write_similarity_csv(m));
    add_manifest(out, config, "predict", {output_name});
    return out.commit(config.out_dir, std::string(model.empty() ? "cosine" : "fitted") +
                                          " similarities for " + std::to_string(m.size()) + " stimuli");
}

CommandResult cmd_mds(const PipelineConfig& config, const std::string& matrix) {
    const auto sim = read_similarity_csv(require_path(matrix, "similarity matrix"), MatrixKind::kPredicted);
    const auto dissim = to_dissimilarity(sim);
    NonmetricOptions options;
    options.mds = {config.mds.dim, config.mds.max_iter, config.mds.tol};
    options.restarts = config.mds.restarts;
    options.seed = config.seed;
    options.jobs = config.jobs;
    const auto result = nonmetric_mds(dissim, options);
    const auto& best = result.best;

    std::vector<std::string> header{"stimulus_id"};
    if (config.mds.dim == 2) {
        header.insert(header.end(), {"x", "y"});
    } else {
        for (std::size_t k = 0; k < config.mds.dim; ++k) header.push_back("dim" + std::to_string(k + 1));
    }
    std::string coords = csv::join_row(header) + "\n";
    for (std::size_t i = 0; i < sim.size(); ++i) {
        coords += csv::escape(sim.ids[i]);
        for (Eigen::Index k = 0; k < best.coords.cols(); ++k) {
            coords += "," + format_real(best.coords(static_cast<Eigen::Index>(i), k));
        }
        coords += "\n";
    }

    nlohmann::ordered_json meta;
    meta["stress"] = best.stress;
    meta["best_run"] = result.best_run;
    meta["iterations"] = best.iterations;
    meta["converged"] = best.converged;
    meta["metric_stress"] = result.metric.stress;
    meta["metric_iterations"] = result.metric.iterations;
    meta["runs"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        meta["runs"].push_back({{"run", r},
                                {"init", r == 0 ? "metric" : "random"},
                                {"stress", result.runs[r].stress},
                                {"iterations", result.runs[r].iterations},
                                {"converged", result.runs[r].converged}});
    }
    meta["settings"] = {{"dim", config.mds.dim},
                        {"restarts", config.mds.restarts},
                        {"max_iter", config.mds.max_iter},
                        {"tol", config.mds.tol}};
    meta["provenance"] = provenance(config, "mds");

    OutputSet out;
    std::vector<std::string> files{"coords.csv", "mds.json"};
    out.add("coords.csv", coords);
    out.add("mds.json", dump(meta));
    if (config.mds.dim >= 2) {
        auto svg = render_svg(best.coords, sim.ids);
        svg.insert(svg.find('\n') + 1, "<!-- simjudge " SIMJUDGE_VERSION " config " + config_hash(config) +
                                           " seed " + std::to_string(config.seed) + " -->\n");
        out.add("mds.svg", svg);
        files.push_back("mds.svg");
    }
    add_manifest(out, config, "mds", files);
    char summary[128];
    std::snprintf(summary, sizeof summary, "non-metric MDS of %zu stimuli, stress-1 %.6g (run %zu)",
                  sim.size(), best.stress, result.best_run);
    return out.commit(config.out_dir, summary);
}

CommandResult cmd_report(const PipelineConfig& config, const ReportInputs& inputs) {
    OutputSet out;
    std::vector<std::string> files;
    std::string summary;
    if (!inputs.scores.empty() || !inputs.reports.empty()) {
        ScoresTable table;
        if (!inputs.scores.empty()) {
            table = scores_from_json(read_text_file(inputs.scores));
        } else {
            std::vector<EvalReport> reports;
            for (const auto& p : inputs.reports) {
                try {
                    reports.push_back(report_from_json(nlohmann::json::parse(read_text_file(p))));
                } catch (const nlohmann::json::exception& e) {
                    throw InputError(p + ": " + e.what());
                }
            }
            table = scores_from_reports(reports);
        }
        out.add("table.md", render_markdown(table, inputs.precision));
        out.add("scores.json", scores_to_json(table));
        files = {"table.md", "scores.json"};
        summary = "rendered " + std::to_string(table.rows.size()) + " rows x " +
                  std::to_string(table.datasets.size()) + " datasets";
    }
    if (!inputs.discrepancy_a.empty() || !inputs.discrepancy_b.empty()) {
        const auto a = read_similarity_csv(require_path(inputs.discrepancy_a, "first prediction matrix"),
                                           MatrixKind::kPredicted);
        const auto b = read_similarity_csv(require_path(inputs.discrepancy_b, "second prediction matrix"),
                                           MatrixKind::kPredicted);
        const auto human = read_similarity_csv(require_path(config.human_matrix, "human similarity matrix"),
                                               MatrixKind::kHuman);
        const auto rows = rank_discrepancies(a, b, human, config.top_k);
        out.add("discrepancies.csv", discrepancies_to_csv(rows));
        files.push_back("discrepancies.csv");
        summary += (summary.empty() ? "" : "; ") + std::to_string(rows.size()) + " discrepant pairs ranked";
    }
    if (files.empty()) throw InputError("report needs --scores, --reports or two --discrepancy matrices");
    add_manifest(out, config, "report", files);
    return out.commit(config.out_dir, summary);
}

}  // namespace simjudge

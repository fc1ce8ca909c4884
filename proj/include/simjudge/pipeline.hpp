#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "simjudge/mds.hpp"

namespace simjudge {

struct SourceSpec {
    std::string name;
    std::string path;
};

struct MdsConfig {
    std::size_t dim = 2;
    std::size_t restarts = 4;
    std::size_t max_iter = 10000;
    double tol = 1e-100;
};

// Everything a command needs. Loaded from one JSON document; CLI flags
// override individual fields. Relative paths in a config file resolve
// against the file's directory.
struct PipelineConfig {
    std::string dataset = "dataset";

    // inputs
    std::string labels;           // CSV stimulus_id,label
    std::string descriptions;     // CSV participant_id,image_id,trial_index,text
    std::string word_embeddings;  // embedding table for label lookup
    std::string synonyms;         // TSV label -> replacement
    std::string human_matrix;     // similarity CSV
    std::vector<SourceSpec> sources;           // fit-eval representations
    std::string layers_name = "sentence";      // model name for the layer set
    std::vector<std::string> sentence_layers;  // per-layer tables, layer 0 first

    // evaluation
    std::size_t k_folds = 6;
    std::uint64_t seed = 0;
    std::vector<double> alphas;  // empty: default grid
    std::size_t inner_folds = 5;
    std::string layer_selection = "post_hoc";  // or "nested"
    bool unit_normalize = true;
    bool standardize_features = false;
    bool fit_intercept = true;

    // encoding
    double epsilon = 0.8;

    // corpus QC
    double repetition_threshold = 0.2;
    std::size_t min_trials = 5;
    std::size_t min_chars = 10;

    MdsConfig mds;
    std::size_t top_k = 20;

    // execution (not part of the provenance hash)
    std::size_t jobs = 1;
    std::string out_dir = ".";
};

PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
nlohmann::ordered_json config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::string& path);

// FNV-1a 64 over the canonical config JSON, excluding jobs and out_dir.
std::string config_hash(const PipelineConfig& config);

nlohmann::ordered_json provenance(const PipelineConfig& config, const std::string& command);

struct CommandResult {
    std::vector<std::string> written;  // paths relative to out_dir
    std::vector<std::string> warnings;
    std::string summary;
};

// Quality control of the description corpus: qc_report.json,
// filtered_descriptions.csv, pooled_descriptions.json.
CommandResult cmd_qc(const PipelineConfig& config);

enum class EncodeSource { kOneHot, kSmoothedOneHot, kWordEmbedding };
EncodeSource parse_encode_source(const std::string& name);

// Per-stimulus embedding file <source>.txt (+ vocabulary or lookup log).
CommandResult cmd_encode(const PipelineConfig& config, EncodeSource source,
                         const std::string& output_name = {});

// Z-score and concatenate config.sources into <output_name>.
CommandResult cmd_combine(const PipelineConfig& config, const std::string& output_name = "combined.txt");

// Evaluates every source, the layer set (if any) and, for two or more
// representations, their normalised concatenation.
CommandResult cmd_fit_eval(const PipelineConfig& config);

// Raw cosine (no model) or fitted similarity matrix for one embedding table.
CommandResult cmd_predict(const PipelineConfig& config, const std::string& embeddings,
                          const std::string& model = {}, const std::string& output_name = "predicted.csv");

// Similarity CSV -> dissimilarities -> non-metric MDS: coords.csv, mds.json, mds.svg.
CommandResult cmd_mds(const PipelineConfig& config, const std::string& matrix);

struct ReportInputs {
    std::string scores;                // scores JSON
    std::vector<std::string> reports;  // EvalReport JSON files
    std::string discrepancy_a, discrepancy_b;  // predicted similarity CSVs
    int precision = 2;
};

// Renders table.md (+ scores.json with recomputed means) and, when two
// prediction matrices are given, discrepancies.csv against config.human_matrix.
CommandResult cmd_report(const PipelineConfig& config, const ReportInputs& inputs);

}  // namespace simjudge

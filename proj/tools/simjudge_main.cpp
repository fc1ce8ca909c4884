// simjudge: command line front end for the prediction pipeline.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simjudge/errors.hpp"
#include "simjudge/pipeline.hpp"

using namespace simjudge;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, k_folds, inner_folds, top_k, min_trials, min_chars;
    std::optional<std::size_t> mds_dim, mds_restarts, mds_max_iter;
    std::optional<double> epsilon, threshold, mds_tol;
    std::vector<double> alphas;
    std::optional<std::string> out_dir, dataset, labels, descriptions, word_embeddings, synonyms, human,
        layer_selection, layers_name;
    std::vector<std::string> sources;  // name=path
    std::vector<std::string> layers;
};

SourceSpec parse_source(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
        throw InputError("--source expects NAME=PATH, got '" + arg + "'");
    }
    return {arg.substr(0, eq), arg.substr(eq + 1)};
}

void apply(PipelineConfig& c, const Overrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.k_folds) c.k_folds = *o.k_folds;
    if (o.inner_folds) c.inner_folds = *o.inner_folds;
    if (o.top_k) c.top_k = *o.top_k;
    if (o.min_trials) c.min_trials = *o.min_trials;
    if (o.min_chars) c.min_chars = *o.min_chars;
    if (o.mds_dim) c.mds.dim = *o.mds_dim;
    if (o.mds_restarts) c.mds.restarts = *o.mds_restarts;
    if (o.mds_max_iter) c.mds.max_iter = *o.mds_max_iter;
    if (o.mds_tol) c.mds.tol = *o.mds_tol;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.threshold) c.repetition_threshold = *o.threshold;
    if (!o.alphas.empty()) c.alphas = o.alphas;
    if (o.out_dir) c.out_dir = *o.out_dir;
    if (o.dataset) c.dataset = *o.dataset;
    if (o.labels) c.labels = *o.labels;
    if (o.descriptions) c.descriptions = *o.descriptions;
    if (o.word_embeddings) c.word_embeddings = *o.word_embeddings;
    if (o.synonyms) c.synonyms = *o.synonyms;
    if (o.human) c.human_matrix = *o.human;
    if (o.layer_selection) c.layer_selection = *o.layer_selection;
    if (o.layers_name) c.layers_name = *o.layers_name;
    if (!o.sources.empty()) {
        c.sources.clear();
        for (const auto& s : o.sources) c.sources.push_back(parse_source(s));
    }
    if (!o.layers.empty()) c.sentence_layers = o.layers;
    if (c.k_folds < 2) throw InputError("--k-folds must be at least 2");
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) throw InputError("--epsilon must be in [0, 1)");
    if (c.layer_selection != "post_hoc" && c.layer_selection != "nested") {
        throw InputError("--layer-selection must be post_hoc or nested");
    }
    if (c.jobs == 0) c.jobs = 1;
}

void print(const CommandResult& r, bool quiet) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (quiet) return;
    if (!r.summary.empty()) std::cout << r.summary << "\n";
    for (const auto& f : r.written) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predict human similarity judgments from image labels and descriptions"};
    app.set_version_flag("--version", std::string(SIMJUDGE_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    bool quiet = false;
    Overrides o;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--jobs", o.jobs, "Worker threads");
    app.add_option("--out-dir", o.out_dir, "Output directory");
    app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");
    app.add_option("--dataset", o.dataset, "Dataset name");

    auto* qc = app.add_subcommand("qc", "Validate and screen a description corpus");
    qc->add_option("--descriptions", o.descriptions, "participant_id,image_id,trial_index,text CSV");
    qc->add_option("--threshold", o.threshold, "Repetition threshold on mean normalised edit distance");
    qc->add_option("--min-trials", o.min_trials, "Responses before the repetition screen applies");
    qc->add_option("--min-chars", o.min_chars, "Minimum description length in characters");

    std::string encode_source;
    std::string encode_output;
    auto* encode = app.add_subcommand("encode", "Build per-stimulus embeddings from labels");
    encode->add_option("source", encode_source, "onehot | smoothed-onehot | word-embedding")->required();
    encode->add_option("--labels", o.labels, "stimulus_id,label CSV");
    encode->add_option("--word-embeddings", o.word_embeddings, "Word embedding table");
    encode->add_option("--synonyms", o.synonyms, "Synonym TSV");
    encode->add_option("--epsilon", o.epsilon, "Smoothing parameter");
    encode->add_option("-o,--output", encode_output, "Output file name inside out-dir");

    std::string combine_output = "combined.txt";
    auto* combine = app.add_subcommand("combine", "Z-score and concatenate embedding tables");
    combine->add_option("--source", o.sources, "NAME=PATH, repeatable");
    combine->add_option("-o,--output", combine_output, "Output file name inside out-dir");

    auto* fit = app.add_subcommand("fit-eval", "Fit ridge models and score Raw, LT-Train and LT-CCV");
    fit->add_option("--human", o.human, "Human similarity CSV");
    fit->add_option("--source", o.sources, "NAME=PATH, repeatable");
    fit->add_option("--layer", o.layers, "Per-layer embedding table, repeatable, layer 0 first");
    fit->add_option("--layers-name", o.layers_name, "Model name for the layer set");
    fit->add_option("--layer-selection", o.layer_selection, "post_hoc | nested");
    fit->add_option("--k-folds", o.k_folds, "Outer folds");
    fit->add_option("--inner-folds", o.inner_folds, "Inner folds for alpha selection");
    fit->add_option("--alphas", o.alphas, "Ridge penalty grid")->delimiter(',');

    std::string predict_embeddings, predict_model, predict_output = "predicted.csv";
    auto* predict = app.add_subcommand("predict", "Similarity matrix from an embedding table");
    predict->add_option("--embeddings", predict_embeddings, "Embedding table")->required();
    predict->add_option("--model", predict_model, "Model JSON; cosine similarity when absent");
    predict->add_option("-o,--output", predict_output, "Output file name inside out-dir");

    std::string mds_matrix;
    auto* mds = app.add_subcommand("mds", "Non-metric MDS of a similarity matrix");
    mds->add_option("--matrix", mds_matrix, "Similarity CSV")->required();
    mds->add_option("--dim", o.mds_dim, "Output dimensions");
    mds->add_option("--restarts", o.mds_restarts, "Number of SMACOF runs");
    mds->add_option("--max-iter", o.mds_max_iter, "Iteration cap per run");
    mds->add_option("--tol", o.mds_tol, "Relative stress tolerance");

    ReportInputs report_inputs;
    std::vector<std::string> discrepancy;
    auto* report = app.add_subcommand("report", "Render score tables and discrepancy rankings");
    report->add_option("--scores", report_inputs.scores, "Scores JSON");
    report->add_option("--reports", report_inputs.reports, "fit-eval report.json files");
    report->add_option("--precision", report_inputs.precision, "Decimal places")->check(CLI::Range(0, 12));
    report->add_option("--discrepancy", discrepancy, "Two prediction CSVs A B")->expected(2);
    report->add_option("--human", o.human, "Human similarity CSV");
    report->add_option("--top-k", o.top_k, "Pairs to keep, 0 for all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        PipelineConfig config = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        apply(config, o);

        CommandResult result;
        if (*qc) {
            result = cmd_qc(config);
        } else if (*encode) {
            result = cmd_encode(config, parse_encode_source(encode_source), encode_output);
        } else if (*combine) {
            result = cmd_combine(config, combine_output);
        } else if (*fit) {
            result = cmd_fit_eval(config);
        } else if (*predict) {
            result = cmd_predict(config, predict_embeddings, predict_model, predict_output);
        } else if (*mds) {
            result = cmd_mds(config, mds_matrix);
        } else if (*report) {
            if (!discrepancy.empty()) {
                report_inputs.discrepancy_a = discrepancy.at(0);
                report_inputs.discrepancy_b = discrepancy.at(1);
            }
            result = cmd_report(config, report_inputs);
        }
        print(result, quiet);
        return 0;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

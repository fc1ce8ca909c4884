#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "simjudge/corpus_qc.hpp"
#include "simjudge/embedding_store.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/evaluation.hpp"
#include "simjudge/folds.hpp"
#include "simjudge/label_encoder.hpp"
#include "simjudge/mds.hpp"
#include "simjudge/pipeline.hpp"
#include "simjudge/report.hpp"
#include "simjudge/ridge.hpp"
#include "simjudge/scoring.hpp"
#include "simjudge/similarity.hpp"

namespace py = pybind11;
using namespace simjudge;

namespace {

EmbeddingTable make_table(const std::vector<std::string>& names, const Eigen::MatrixXd& values) {
    if (static_cast<Eigen::Index>(names.size()) != values.rows()) {
        throw InputError("names and matrix rows differ in count");
    }
    return EmbeddingTable::from_matrix(names, values);
}

SimilarityMatrix make_human(const std::vector<std::string>& ids, const Eigen::MatrixXd& values) {
    SimilarityMatrix m{ids, values, MatrixKind::kHuman};
    m.validate();
    return m;
}

py::dict score_dict(const MethodScore& s) {
    py::dict d;
    d["r2"] = s.r2;
    d["r"] = s.r;
    return d;
}

py::dict model_dict(const RidgeModel& m) {
    py::dict d;
    d["weights"] = Eigen::VectorXd(m.weights);
    d["intercept"] = m.intercept;
    d["alpha"] = m.alpha;
    return d;
}

py::dict result_dict(const CommandResult& r) {
    py::dict d;
    d["written"] = r.written;
    d["warnings"] = r.warnings;
    d["summary"] = r.summary;
    return d;
}

PipelineConfig config_with(const std::string& path, const std::string& out_dir) {
    auto config = load_config(path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Similarity-judgment prediction core";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine(a, b);
    }, py::arg("a"), py::arg("b"));

    m.def("cosine_matrix", [](const std::vector<std::string>& names, const Eigen::MatrixXd& values) {
        return Eigen::MatrixXd(cosine_matrix(make_table(names, values)).values);
    }, py::arg("names"), py::arg("values"));

    m.def("parse_embeddings", [](const std::string& text) {
        const auto table = parse_embedding_file(text);
        return py::make_tuple(table.names(), table.matrix());
    }, py::arg("text"), "Parse embedding text into (names, matrix).");

    m.def("write_embeddings", [](const std::vector<std::string>& names, const Eigen::MatrixXd& values) {
        return write_embedding_file(make_table(names, values));
    }, py::arg("names"), py::arg("values"));

    m.def("smooth_one_hot", [](std::size_t k, std::size_t hot, double epsilon) {
        if (hot >= k) throw InputError("hot index out of range");
        OneHotVector v;
        v.v.assign(k, 0.0);
        v.v[hot] = 1.0;
        v.hot_index = hot;
        return smooth(v, epsilon);
    }, py::arg("k"), py::arg("hot_index"), py::arg("epsilon") = kDefaultSmoothing);

    m.def("smoothing_degenerate", &smoothing_degenerate, py::arg("k"), py::arg("epsilon"));

    m.def("fit_ridge", [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                          bool fit_intercept, bool standardize) {
        return model_dict(fit_ridge(x, y, alpha, RidgeOptions{fit_intercept, standardize}));
    }, py::arg("x"), py::arg("y"), py::arg("alpha"), py::arg("fit_intercept") = true,
       py::arg("standardize") = false);

    m.def("pearson_r", [](const std::vector<double>& p, const std::vector<double>& t) {
        return pearson_r(p, t);
    }, py::arg("pred"), py::arg("truth"));
    m.def("pearson_r2", [](const std::vector<double>& p, const std::vector<double>& t) {
        return pearson_r2(p, t);
    }, py::arg("pred"), py::arg("truth"));

    m.def("make_folds", [](std::size_t n, std::size_t k, std::uint64_t seed) {
        return make_folds(n, k, seed).assignment;
    }, py::arg("n"), py::arg("k"), py::arg("seed") = 0, "Fold id per image.");

    m.def("evaluate", [](const std::vector<std::string>& names, const Eigen::MatrixXd& values,
                         const Eigen::MatrixXd& human, std::size_t k_folds, std::uint64_t seed,
                         std::vector<double> alphas) {
        const auto h = make_human(names, human);
        const auto plan = make_folds(names.size(), k_folds, seed);
        EvalOptions options;
        options.seed = seed;
        if (!alphas.empty()) options.alphas = std::move(alphas);
        const auto e = evaluate_model("model", make_table(names, values), h, plan, options);
        py::dict d;
        d["raw"] = score_dict(e.raw);
        d["lt_train"] = score_dict(e.lt_train);
        d["lt_ccv"] = score_dict(e.lt_ccv);
        d["train_model"] = model_dict(e.train_model);
        d["folds"] = plan.assignment;
        return d;
    }, py::arg("names"), py::arg("values"), py::arg("human"), py::arg("k_folds") = kDefaultFolds,
       py::arg("seed") = 0, py::arg("alphas") = std::vector<double>{},
       "Raw, LT-Train and LT-CCV scores of one representation.");

    m.def("levenshtein", [](const std::string& a, const std::string& b) {
        return levenshtein(a, b);
    }, py::arg("a"), py::arg("b"));
    m.def("normalized_levenshtein", [](const std::string& a, const std::string& b) {
        return normalized_levenshtein(a, b);
    }, py::arg("a"), py::arg("b"));

    m.def("pava", [](const std::vector<double>& y, std::vector<double> w) {
        if (w.empty()) return pava(y);
        return pava(y, w);
    }, py::arg("y"), py::arg("weights") = std::vector<double>{});

    m.def("nonmetric_mds", [](const Eigen::MatrixXd& dissim, std::size_t dim, std::size_t restarts,
                              std::uint64_t seed, std::size_t max_iter, double tol) {
        NonmetricOptions options;
        options.mds.dim = dim;
        options.mds.max_iter = max_iter;
        options.mds.tol = tol;
        options.restarts = restarts;
        options.seed = seed;
        const auto r = nonmetric_mds(dissim, options);
        py::dict d;
        d["coords"] = Eigen::MatrixXd(r.best.coords);
        d["stress"] = r.best.stress;
        d["best_run"] = r.best_run;
        return d;
    }, py::arg("dissim"), py::arg("dim") = 2, py::arg("restarts") = 4, py::arg("seed") = 0,
       py::arg("max_iter") = 10000, py::arg("tol") = 1e-100);

    m.def("render_markdown", [](const std::string& scores_json, int precision) {
        return render_markdown(scores_from_json(scores_json), precision);
    }, py::arg("scores_json"), py::arg("precision") = 2);

    m.def("config_hash", [](const std::string& path) { return config_hash(load_config(path)); },
          py::arg("config"));

    m.def("run_qc", [](const std::string& config, const std::string& out_dir) {
        return result_dict(cmd_qc(config_with(config, out_dir)));
    }, py::arg("config"), py::arg("out_dir") = "");
    m.def("run_encode", [](const std::string& config, const std::string& source, const std::string& out_dir) {
        return result_dict(cmd_encode(config_with(config, out_dir), parse_encode_source(source)));
    }, py::arg("config"), py::arg("source"), py::arg("out_dir") = "");
    m.def("run_combine", [](const std::string& config, const std::string& out_dir) {
        return result_dict(cmd_combine(config_with(config, out_dir)));
    }, py::arg("config"), py::arg("out_dir") = "");
    m.def("run_fit_eval", [](const std::string& config, const std::string& out_dir) {
        return result_dict(cmd_fit_eval(config_with(config, out_dir)));
    }, py::arg("config"), py::arg("out_dir") = "");
    m.def("run_predict", [](const std::string& config, const std::string& embeddings,
                            const std::string& model, const std::string& out_dir) {
        return result_dict(cmd_predict(config_with(config, out_dir), embeddings, model));
    }, py::arg("config"), py::arg("embeddings"), py::arg("model") = "", py::arg("out_dir") = "");
    m.def("run_mds", [](const std::string& config, const std::string& matrix, const std::string& out_dir) {
        return result_dict(cmd_mds(config_with(config, out_dir), matrix));
    }, py::arg("config"), py::arg("matrix"), py::arg("out_dir") = "");

    m.attr("__version__") = SIMJUDGE_VERSION;
}

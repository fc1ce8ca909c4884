#include "simjudge/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "simjudge/errors.hpp"
#include "simjudge/folds.hpp"
#include "simjudge/rng.hpp"
#include "simjudge/scoring.hpp"

namespace simjudge {

PairDesign PairDesign::subset(std::span<const std::size_t> row_indices) const {
    PairDesign out;
    out.unit_normalized = unit_normalized;
    out.rows.resize(static_cast<Eigen::Index>(row_indices.size()), rows.cols());
    out.targets.resize(static_cast<Eigen::Index>(row_indices.size()));
    out.pairs.reserve(row_indices.size());
    for (std::size_t r = 0; r < row_indices.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(row_indices[r]);
        out.rows.row(static_cast<Eigen::Index>(r)) = rows.row(src);
        out.targets[static_cast<Eigen::Index>(r)] = targets[src];
        out.pairs.push_back(pairs[row_indices[r]]);
    }
    return out;
}

PairDesign build_pair_design(const EmbeddingTable& embs, const SimilarityMatrix& human,
                             std::span<const PairIndex> pairs, FeatureOptions options) {
    if (embs.size() != human.size()) {
        throw InputError("pair design: embeddings and human matrix cover different stimuli");
    }
    for (std::size_t i = 0; i < embs.size(); ++i) {
        if (embs.name(i) != human.ids[i]) {
            throw InputError("pair design: embedding order does not match the human matrix at '" +
                             human.ids[i] + "'");
        }
    }
    const EmbeddingTable z = options.unit_normalize ? unit_normalize(embs) : embs;
    const auto d = static_cast<Eigen::Index>(z.dim());

    PairDesign design;
    design.unit_normalized = options.unit_normalize;
    design.rows.resize(static_cast<Eigen::Index>(pairs.size()), d);
    design.targets.resize(static_cast<Eigen::Index>(pairs.size()));
    design.pairs.assign(pairs.begin(), pairs.end());
    std::set<PairIndex> seen;
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto [i, j] = pairs[r];
        if (i >= j || j >= z.size()) {
            throw InputError("pair design: invalid pair (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
        }
        if (!seen.insert(pairs[r]).second) throw InputError("pair design: duplicate pair");
        const auto a = z.row(i), b = z.row(j);
        for (Eigen::Index k = 0; k < d; ++k) design.rows(r, k) = a[k] * b[k];
        design.targets[static_cast<Eigen::Index>(r)] = human.values(i, j);
    }
    return design;
}

namespace {

// Centred (and optionally scaled) normal equations, reusable across alphas.
struct NormalSystem {
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    Eigen::VectorXd x_mean;
    Eigen::VectorXd scale;
    double y_mean = 0.0;
    bool intercept = true;

    NormalSystem(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, RidgeOptions options)
        : intercept(options.fit_intercept) {
        if (x.rows() < 1) throw InputError("ridge: need at least one row");
        if (x.rows() != y.size()) throw InputError("ridge: row and target counts differ");
        if (!x.allFinite() || !y.allFinite()) throw InputError("ridge: non-finite input");
        const auto d = x.cols();
        x_mean = intercept ? Eigen::VectorXd(x.colwise().mean().transpose())
                           : Eigen::VectorXd::Zero(d);
        y_mean = intercept ? y.mean() : 0.0;
        Eigen::MatrixXd xc = x.rowwise() - x_mean.transpose();
        scale = Eigen::VectorXd::Ones(d);
        if (options.standardize) {
            for (Eigen::Index k = 0; k < d; ++k) {
                const double sd = std::sqrt(xc.col(k).squaredNorm() / static_cast<double>(x.rows()));
                if (sd > 1e-12) scale[k] = sd;
            }
            xc = xc * scale.cwiseInverse().asDiagonal();
        }
        gram = Eigen::MatrixXd::Zero(d, d);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
        gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
        rhs = xc.transpose() * (y.array() - y_mean).matrix();
    }

    RidgeModel solve(double alpha) const {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("ridge: alpha must be >= 0");
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += alpha;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success || llt.rcond() < 1e-15) {
            throw NumericError("ridge: normal matrix is singular at alpha = " + std::to_string(alpha));
        }
        RidgeModel model;
        model.alpha = alpha;
        model.weights = llt.solve(rhs).cwiseQuotient(scale);
        model.intercept = intercept ? y_mean - x_mean.dot(model.weights) : 0.0;
        if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
            throw NumericError("ridge: solution is not finite");
        }
        return model;
    }
};

}  // namespace

RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                     RidgeOptions options) {
    return NormalSystem(x, y, options).solve(alpha);
}

RidgeModel fit_ridge(const PairDesign& design, double alpha, RidgeOptions options) {
    auto model = fit_ridge(design.rows, design.targets, alpha, options);
    model.unit_normalized = design.unit_normalized;
    return model;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(std::pow(10.0, -3.0 + i));
    return grid;
}

AlphaSelection select_alpha(const PairDesign& design, std::span<const double> alphas,
                            std::size_t inner_folds, std::uint64_t seed, RidgeOptions options) {
    if (alphas.empty()) throw InputError("alpha grid is empty");
    AlphaSelection out;
    if (alphas.size() == 1) {
        out.alpha = alphas[0];
        return out;
    }

    std::set<std::size_t> image_set;
    for (const auto& p : design.pairs) image_set.insert({p.i, p.j});
    const std::vector<std::size_t> images(image_set.begin(), image_set.end());
    std::vector<std::size_t> local(images.empty() ? 0 : images.back() + 1, 0);
    for (std::size_t k = 0; k < images.size(); ++k) local[images[k]] = k;

    const auto plan = make_folds(images.size(), inner_folds, derive_seed(seed, stream::kInnerFolds));
    out.mean_r2.assign(alphas.size(), 0.0);
    for (std::size_t f = 0; f < inner_folds; ++f) {
        std::vector<std::size_t> train, val;
        for (std::size_t r = 0; r < design.size(); ++r) {
            const bool in_i = plan.assignment[local[design.pairs[r].i]] == f;
            const bool in_j = plan.assignment[local[design.pairs[r].j]] == f;
            if (in_i && in_j) val.push_back(r);
            else if (!in_i && !in_j) train.push_back(r);
        }
        if (val.size() < 3) {
            throw InputError("alpha selection: inner fold " + std::to_string(f) + " has only " +
                             std::to_string(val.size()) + " validation pairs");
        }
        const auto tr = design.subset(train);
        const auto va = design.subset(val);
        const NormalSystem system(tr.rows, tr.targets, options);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            const auto model = system.solve(alphas[a]);
            const Eigen::VectorXd pred = predict(va.rows, model);
            double r2 = 0.0;
            try {
                r2 = pearson_r2({pred.data(), static_cast<std::size_t>(pred.size())},
                                {va.targets.data(), static_cast<std::size_t>(va.targets.size())});
            } catch (const NumericError&) {
                r2 = 0.0;  // constant predictions explain nothing
            }
            out.mean_r2[a] += r2 / static_cast<double>(inner_folds);
        }
    }

    std::size_t best = 0;
    for (std::size_t a = 1; a < alphas.size(); ++a) {
        if (out.mean_r2[a] > out.mean_r2[best] ||
            (out.mean_r2[a] == out.mean_r2[best] && alphas[a] > alphas[best])) {
            best = a;
        }
    }
    out.alpha = alphas[best];
    return out;
}

Eigen::VectorXd predict(const Eigen::MatrixXd& rows, const RidgeModel& model) {
    if (rows.cols() != model.weights.size()) throw InputError("predict: dimension mismatch");
    return (rows * model.weights).array() + model.intercept;
}

Eigen::VectorXd predict(const PairDesign& design, const RidgeModel& model) {
    return predict(design.rows, model);
}

std::string model_to_json(const RidgeModel& model) {
    nlohmann::ordered_json j;
    j["alpha"] = model.alpha;
    j["intercept"] = model.intercept;
    j["weights"] = std::vector<double>(model.weights.data(),
                                       model.weights.data() + model.weights.size());
    j["feature_dim"] = model.feature_dim();
    j["normalization"] = model.unit_normalized;
    return j.dump(2) + "\n";
}

RidgeModel model_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RidgeModel model;
        model.alpha = j.at("alpha").get<double>();
        model.intercept = j.at("intercept").get<double>();
        const auto w = j.at("weights").get<std::vector<double>>();
        model.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
        model.unit_normalized = j.value("normalization", true);
        if (j.at("feature_dim").get<std::size_t>() != w.size()) {
            throw InputError("model JSON: feature_dim does not match weights");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("model JSON: ") + e.what());
    }
}

}  // namespace simjudge

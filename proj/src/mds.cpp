#include "simjudge/mds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "simjudge/errors.hpp"
#include "simjudge/parallel.hpp"
#include "simjudge/rng.hpp"

namespace simjudge {

std::vector<double> pava(std::span<const double> y, std::span<const double> weights) {
    if (y.empty()) throw InputError("pava: empty input");
    if (y.size() != weights.size()) throw InputError("pava: value and weight lengths differ");
    struct Block {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(weights[i] > 0.0)) throw InputError("pava: weights must be positive");
        blocks.push_back({y[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w = prev.weight + top.weight;
            prev.value = (prev.value * prev.weight + top.value * top.weight) / w;
            prev.weight = w;
            prev.count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.value);
    return out;
}

std::vector<double> pava(std::span<const double> y) {
    const std::vector<double> w(y.size(), 1.0);
    return pava(y, w);
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
    const auto n = x.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
        }
    }
    return d;
}

namespace {

void center(Eigen::MatrixXd& x) { x.rowwise() -= x.colwise().mean(); }

void check_dissimilarities(const Eigen::MatrixXd& d) {
    const auto n = d.rows();
    if (d.cols() != n) throw InputError("dissimilarity matrix must be square");
    if (n < 2) throw InputError("MDS needs at least 2 points");
    bool any_positive = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) throw InputError("dissimilarity diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
                throw InputError("dissimilarities must be finite and non-negative");
            }
            if (std::abs(d(i, j) - d(j, i)) > 1e-9 * std::max(1.0, std::abs(d(i, j)))) {
                throw InputError("dissimilarity matrix must be symmetric");
            }
            any_positive = any_positive || d(i, j) > 0.0;
        }
    }
    if (!any_positive) throw NumericError("all dissimilarities are zero");
}

// Upper-triangle helpers share all_pairs order: (0,1), (0,2), ..., (n-2,n-1).
std::vector<double> upper(const Eigen::MatrixXd& m) {
    std::vector<double> out;
    const auto n = m.rows();
    out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out.push_back(m(i, j));
    }
    return out;
}

double raw_stress(const std::vector<double>& target, const std::vector<double>& dist) {
    double s = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        const double e = target[k] - dist[k];
        s += e * e;
    }
    return s;
}

// X <- (1/n) B(X) X with b_ij = -t_ij / d_ij for d_ij > 0.
Eigen::MatrixXd guttman(const Eigen::MatrixXd& x, const std::vector<double>& target,
                        const std::vector<double>& dist) {
    const auto n = x.rows();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j, ++k) {
            const double v = dist[k] > 0.0 ? -target[k] / dist[k] : 0.0;
            b(i, j) = b(j, i) = v;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) b(i, i) = -b.row(i).sum();
    return b * x / static_cast<double>(n);
}

// Fits non-decreasing disparities to `dist` along `order` (dissimilarity rank
// order), letting tied dissimilarities reorder by current distance.
std::vector<double> fit_disparities(const std::vector<double>& delta,
                                    const std::vector<std::size_t>& order,
                                    const std::vector<double>& dist) {
    std::vector<std::size_t> idx = order;
    std::size_t start = 0;
    while (start < idx.size()) {
        std::size_t end = start + 1;
        while (end < idx.size() && delta[idx[end]] == delta[idx[start]]) ++end;
        if (end - start > 1) {
            std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                             idx.begin() + static_cast<std::ptrdiff_t>(end),
                             [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
        }
        start = end;
    }
    std::vector<double> ordered(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ordered[k] = dist[idx[k]];
    const auto fitted = pava(ordered);
    std::vector<double> out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = std::max(fitted[k], 0.0);
    return out;
}

std::vector<std::size_t> rank_order(const std::vector<double>& delta) {
    std::vector<std::size_t> order(delta.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return delta[a] < delta[b]; });
    return order;
}

Eigen::MatrixXd check_init(const Eigen::MatrixXd& init, Eigen::Index n, const MdsOptions& options) {
    if (options.dim == 0) throw InputError("MDS dimension must be positive");
    if (init.rows() != n || init.cols() != static_cast<Eigen::Index>(options.dim)) {
        throw InputError("initial configuration has the wrong shape");
    }
    if (!init.allFinite()) throw InputError("initial configuration is not finite");
    Eigen::MatrixXd x = init;
    center(x);
    return x;
}

// Shared iteration: `targets(dist)` supplies the (possibly refitted) target
// distances for the current configuration.
template <typename TargetFn>
MdsSolution iterate(Eigen::MatrixXd x, const MdsOptions& options, TargetFn targets) {
    MdsSolution sol;
    auto dist = upper(pairwise_distances(x));
    auto target = targets(dist);
    double sigma = raw_stress(target, dist);
    sol.raw_stress_history.push_back(sigma);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        if (sigma == 0.0) {
            sol.converged = true;
            break;
        }
        x = guttman(x, target, dist);
        dist = upper(pairwise_distances(x));
        target = targets(dist);
        const double next = raw_stress(target, dist);
        sol.raw_stress_history.push_back(next);
        sol.iterations = it;
        const double improvement = (sigma - next) / sigma;
        sigma = next;
        if (improvement < options.tol) {
            sol.converged = true;
            break;
        }
    }
    center(x);
    sol.coords = std::move(x);
    return sol;
}

}  // namespace

Eigen::MatrixXd random_configuration(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = rng.uniform(-0.5, 0.5);
    }
    center(x);
    return x;
}

Eigen::MatrixXd classical_scaling(const Eigen::MatrixXd& dissim, std::size_t dim) {
    check_dissimilarities(dissim);
    const auto n = dissim.rows();
    const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) -
                              Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd b = -0.5 * j * dissim.cwiseAbs2() * j;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        const auto col = n - 1 - static_cast<Eigen::Index>(k);  // eigenvalues ascend
        const double lambda = col >= 0 ? std::max(eig.eigenvalues()[col], 0.0) : 0.0;
        x.col(static_cast<Eigen::Index>(k)) =
            col >= 0 ? Eigen::VectorXd(eig.eigenvectors().col(col) * std::sqrt(lambda))
                     : Eigen::VectorXd::Zero(n);
    }
    return x;
}

double stress1(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& coords) {
    const auto dist = upper(pairwise_distances(coords));
    const auto t = upper(targets);
    double denom = 0.0;
    for (double d : dist) denom += d * d;
    if (denom == 0.0) throw NumericError("stress is undefined for a collapsed configuration");
    return std::sqrt(raw_stress(t, dist) / denom);
}

double nonmetric_stress1(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& coords) {
    const auto delta = upper(dissim);
    const auto dist = upper(pairwise_distances(coords));
    const auto dhat = fit_disparities(delta, rank_order(delta), dist);
    double denom = 0.0;
    for (double d : dist) denom += d * d;
    if (denom == 0.0) throw NumericError("stress is undefined for a collapsed configuration");
    return std::sqrt(raw_stress(dhat, dist) / denom);
}

MdsSolution smacof_metric(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& init,
                          const MdsOptions& options) {
    check_dissimilarities(dissim);
    const auto delta = upper(dissim);
    auto sol = iterate(check_init(init, dissim.rows(), options), options,
                       [&](const std::vector<double>&) { return delta; });
    sol.stress = stress1(dissim, sol.coords);
    return sol;
}

MdsSolution smacof_metric(const Eigen::MatrixXd& dissim, std::uint64_t seed,
                          const MdsOptions& options) {
    return smacof_metric(dissim,
                         random_configuration(static_cast<std::size_t>(dissim.rows()), options.dim, seed),
                         options);
}

MdsSolution smacof_nonmetric(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& init,
                             const MdsOptions& options) {
    check_dissimilarities(dissim);
    const auto delta = upper(dissim);
    const auto order = rank_order(delta);
    // Disparities keep a fixed total sum of squares (the pair count), which
    // makes each disparity step an exact minimisation of raw stress.
    const double norm2 = static_cast<double>(delta.size());
    auto sol = iterate(check_init(init, dissim.rows(), options), options,
                       [&](const std::vector<double>& dist) {
                           auto dhat = fit_disparities(delta, order, dist);
                           double ss = 0.0;
                           for (double v : dhat) ss += v * v;
                           if (ss > 0.0) {
                               const double s = std::sqrt(norm2 / ss);
                               for (auto& v : dhat) v *= s;
                           } else {
                               // collapsed configuration: fall back to the dissimilarities
                               dhat = delta;
                           }
                           return dhat;
                       });
    sol.stress = nonmetric_stress1(dissim, sol.coords);
    return sol;
}

NonmetricResult nonmetric_mds(const Eigen::MatrixXd& dissim, const NonmetricOptions& options) {
    check_dissimilarities(dissim);
    if (options.restarts == 0) throw InputError("non-metric MDS needs at least one restart");
    const auto n = static_cast<std::size_t>(dissim.rows());
    NonmetricResult result;
    result.metric = smacof_metric(dissim, derive_seed(options.seed, stream::kMds, 0), options.mds);

    result.runs.resize(options.restarts);
    parallel_for(options.restarts, options.jobs, [&](std::size_t r) {
        const Eigen::MatrixXd init =
            r == 0 ? result.metric.coords
                   : random_configuration(n, options.mds.dim, derive_seed(options.seed, stream::kMds, r));
        result.runs[r] = smacof_nonmetric(dissim, init, options.mds);
    });
    for (std::size_t r = 1; r < result.runs.size(); ++r) {
        if (result.runs[r].stress < result.runs[result.best_run].stress) result.best_run = r;
    }
    result.best = result.runs[result.best_run];
    return result;
}

std::string render_svg(const Eigen::MatrixXd& coords, const std::vector<std::string>& ids) {
    if (coords.cols() < 2) throw InputError("SVG output needs 2-D coordinates");
    const double size = 600.0, margin = 40.0;
    const Eigen::Vector2d lo = coords.leftCols(2).colwise().minCoeff();
    const Eigen::Vector2d hi = coords.leftCols(2).colwise().maxCoeff();
    const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
    auto esc = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            switch (c) {
                case '<': o += "&lt;"; break;
                case '>': o += "&gt;"; break;
                case '&': o += "&amp;"; break;
                case '"': o += "&quot;"; break;
                default: o.push_back(c);
            }
        }
        return o;
    };
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  int(size), int(size), int(size), int(size));
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        const double px = margin + (coords(i, 0) - lo[0]) / span * (size - 2 * margin);
        const double py = size - margin - (coords(i, 1) - lo[1]) / span * (size - 2 * margin);
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"9\" font-family=\"sans-serif\">",
                      px, py, px + 4, py - 4);
        out += buf;
        out += esc(i < static_cast<Eigen::Index>(ids.size()) ? ids[i] : std::to_string(i));
        out += "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace simjudge

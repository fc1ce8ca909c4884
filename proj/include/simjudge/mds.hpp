#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace simjudge {

struct MdsOptions {
    std::size_t dim = 2;
    std::size_t max_iter = 10000;
    // Relative raw-stress improvement below which iteration stops. The
    // default effectively means "until stress stops decreasing".
    double tol = 1e-100;
};

struct MdsSolution {
    Eigen::MatrixXd coords;  // n x dim, column means zero
    double stress = 0.0;     // Kruskal stress-1
    std::size_t iterations = 0;
    bool converged = false;
    // Raw stress sum_{i<j} (target - dist)^2 of every iterate, starting with
    // the initial configuration.
    std::vector<double> raw_stress_history;
};

// Weighted isotonic (non-decreasing) least-squares fit by pool adjacent
// violators. Throws InputError on length mismatch, empty input or
// non-positive weights.
std::vector<double> pava(std::span<const double> y, std::span<const double> weights);
std::vector<double> pava(std::span<const double> y);

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& coords);

// Uniform in [-0.5, 0.5]^dim, then centred.
Eigen::MatrixXd random_configuration(std::size_t n, std::size_t dim, std::uint64_t seed);

// Torgerson scaling: top eigenvectors of the double-centred squared
// dissimilarities.
Eigen::MatrixXd classical_scaling(const Eigen::MatrixXd& dissim, std::size_t dim);

// Kruskal stress-1 of coords against fixed target distances.
double stress1(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& coords);

// Stress-1 against the best monotone (in dissimilarity order) disparities.
double nonmetric_stress1(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& coords);

// Metric SMACOF: repeated Guttman transforms of `init`. Stops when
// (prev - cur) / prev < tol, when stress reaches 0 or after max_iter steps.
// Requires a symmetric, non-negative, zero-diagonal matrix with some
// positive entry.
MdsSolution smacof_metric(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& init,
                          const MdsOptions& options = {});
MdsSolution smacof_metric(const Eigen::MatrixXd& dissim, std::uint64_t seed,
                          const MdsOptions& options = {});

// Non-metric SMACOF from one initial configuration: alternates a monotone
// disparity fit (ties: primary approach) with Guttman updates.
MdsSolution smacof_nonmetric(const Eigen::MatrixXd& dissim, const Eigen::MatrixXd& init,
                             const MdsOptions& options = {});

struct NonmetricOptions {
    MdsOptions mds;
    std::size_t restarts = 4;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct NonmetricResult {
    MdsSolution best;
    std::size_t best_run = 0;
    MdsSolution metric;             // the initialising metric solution
    std::vector<MdsSolution> runs;  // one per restart
};

// Metric SMACOF from a seeded random start, then `restarts` non-metric runs:
// the first from the metric solution, the rest from seeded random
// configurations. Lowest stress-1 wins; ties go to the earlier run.
NonmetricResult nonmetric_mds(const Eigen::MatrixXd& dissim, const NonmetricOptions& options = {});

// Minimal scatter plot of 2-D coordinates with stimulus labels.
std::string render_svg(const Eigen::MatrixXd& coords, const std::vector<std::string>& ids);

}  // namespace simjudge

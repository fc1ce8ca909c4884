#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/mds.hpp"
#include "simjudge/rng.hpp"

using namespace simjudge;

namespace {

Eigen::MatrixXd random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index k = 0; k < p.cols(); ++k) p(i, k) = rng.uniform(-1.0, 1.0);
    return p;
}

void expect_non_increasing(const std::vector<double>& h, double slack) {
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] + slack) << "iterate " << i;
}

Eigen::MatrixXd equidistant(int n) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n, n);
    d.diagonal().setZero();
    return d;
}

}  // namespace

TEST(Pava, Examples) {
    EXPECT_EQ(pava(std::vector<double>{1, 2, 3}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(pava(std::vector<double>{3, 1}), (std::vector<double>{2, 2}));
    EXPECT_EQ(pava(std::vector<double>{1, 3, 2, 4}), (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(Pava, Errors) {
    EXPECT_THROW(pava(std::vector<double>{}), InputError);
    EXPECT_THROW(pava(std::vector<double>{1, 2}, std::vector<double>{1}), InputError);
    EXPECT_THROW(pava(std::vector<double>{1, 2}, std::vector<double>{1, 0}), InputError);
    EXPECT_THROW(pava(std::vector<double>{1, 2}, std::vector<double>{1, -1}), InputError);
}

TEST(Pava, MatchesBruteForceOnSmallInputs) {
    Rng rng(1);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        std::vector<double> y(n), w(n);
        for (auto& x : y) x = trial % 3 == 0 ? static_cast<double>(rng.below(4)) : rng.normal();
        for (auto& x : w) x = trial % 2 ? 1.0 : rng.uniform(0.1, 3.0);
        const auto got = pava(y, w);
        const auto want = oracle::brute_isotonic(y, w);
        ASSERT_EQ(got.size(), n);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(got[i], want[i], 1e-10) << "trial " << trial;
        for (std::size_t i = 1; i < n; ++i) ASSERT_LE(got[i - 1], got[i]);
    }
}

TEST(Smacof, EquilateralTriangleEmbedsExactly) {
    const auto s = smacof_metric(equidistant(3), 1, {2, 10000, 1e-100});
    EXPECT_LT(s.stress, 1e-8);
}

TEST(Smacof, RegularTetrahedronDoesNotFitThePlane) {
    const auto s = smacof_metric(equidistant(4), 1, {2, 10000, 1e-100});
    EXPECT_GT(s.stress, 0.05);
}

TEST(Smacof, ReconstructsPlanarConfiguration) {
    const auto pts = random_points(20, 2, 2);
    const auto d = pairwise_distances(pts);
    const auto s = smacof_metric(d, 3, {2, 10000, 1e-100});
    EXPECT_LT(s.stress, 1e-6);
    EXPECT_LT(oracle::procrustes_rmse(pts, s.coords), 1e-3);
    expect_non_increasing(s.raw_stress_history, 1e-12 * d.squaredNorm());
}

TEST(Smacof, SolutionsAreCentredAndFinite) {
    const auto d = pairwise_distances(random_points(15, 3, 4));
    const auto s = smacof_metric(d, 5, {2, 500, 1e-12});
    EXPECT_TRUE(s.coords.allFinite());
    EXPECT_LT(s.coords.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(s.stress, 0.0);
}

TEST(Smacof, StressInvariantUnderRigidMotion) {
    const auto d = pairwise_distances(random_points(12, 2, 6));
    const auto coords = random_points(12, 2, 7);
    const double theta = 0.7;
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::MatrixXd moved = coords * r;
    moved.rowwise() += Eigen::RowVector2d(3.0, -1.5);
    EXPECT_NEAR(stress1(d, coords), stress1(d, moved), 1e-12);
    EXPECT_NEAR(nonmetric_stress1(d, coords), nonmetric_stress1(d, moved), 1e-12);
}

TEST(Smacof, Errors) {
    EXPECT_THROW(smacof_metric(Eigen::MatrixXd::Zero(3, 3), 1), NumericError);
    EXPECT_THROW(smacof_metric(Eigen::MatrixXd::Zero(1, 1), 1), InputError);
    Eigen::MatrixXd asym = equidistant(3);
    asym(0, 1) = 2.0;
    EXPECT_THROW(smacof_metric(asym, 1), InputError);
    Eigen::MatrixXd negative = equidistant(3);
    negative(0, 1) = negative(1, 0) = -1.0;
    EXPECT_THROW(smacof_metric(negative, 1), InputError);
}

TEST(Smacof, ClassicalScalingRecoversEuclideanConfiguration) {
    const auto pts = random_points(10, 2, 8);
    const auto c = classical_scaling(pairwise_distances(pts), 2);
    EXPECT_LT(oracle::procrustes_rmse(pts, c), 1e-10);
}

TEST(NonmetricMds, CubedDistancesKeepRankOrder) {
    const auto pts = random_points(20, 2, 9);
    const Eigen::MatrixXd cubed = pairwise_distances(pts).array().cube();
    NonmetricOptions o;
    o.seed = 4;
    o.mds.max_iter = 3000;
    const auto r = nonmetric_mds(cubed, o);
    EXPECT_GT(oracle::spearman(oracle::pair_distances(pts), oracle::pair_distances(r.best.coords)), 0.99);
    ASSERT_EQ(r.runs.size(), 4u);
    for (const auto& run : r.runs) expect_non_increasing(run.raw_stress_history, 1e-9);
    EXPECT_EQ(r.best.stress, r.runs[r.best_run].stress);
    for (const auto& run : r.runs) EXPECT_LE(r.best.stress, run.stress);
}

TEST(NonmetricMds, NeverWorseThanMetricOnEuclideanInput) {
    const auto d = pairwise_distances(random_points(12, 3, 10));
    NonmetricOptions o;
    o.mds.max_iter = 2000;
    const auto r = nonmetric_mds(d, o);
    EXPECT_LE(r.best.stress, r.metric.stress + 1e-9);
}

TEST(NonmetricMds, BitIdenticalReruns) {
    const auto d = pairwise_distances(random_points(14, 2, 11));
    NonmetricOptions o;
    o.seed = 99;
    o.mds.max_iter = 400;
    const auto a = nonmetric_mds(d, o);
    o.jobs = 3;
    const auto b = nonmetric_mds(d, o);
    EXPECT_EQ(a.best.coords, b.best.coords);
    EXPECT_EQ(a.best_run, b.best_run);
    EXPECT_EQ(a.best.raw_stress_history, b.best.raw_stress_history);
}

TEST(NonmetricMds, TiedDissimilaritiesMayGetDistinctDisparities) {
    // All dissimilarities tied: any configuration has zero non-metric stress
    // under the primary approach.
    const auto coords = random_points(6, 2, 12);
    EXPECT_NEAR(nonmetric_stress1(equidistant(6), coords), 0.0, 1e-12);
}

TEST(Svg, ContainsOneMarkerPerPoint) {
    const auto coords = random_points(3, 2, 13);
    const auto svg = render_svg(coords, {"a", "b<c", "d"});
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
    std::size_t circles = 0;
    for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    EXPECT_EQ(circles, 3u);
    EXPECT_NE(svg.find("b&lt;c"), std::string::npos);
}

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "simjudge/errors.hpp"
#include "simjudge/ridge.hpp"
#include "simjudge/rng.hpp"
#include "simjudge/similarity.hpp"

using namespace simjudge;

namespace {

EmbeddingTable random_table(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    EmbeddingTable t(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        t.add("s" + std::to_string(i), v);
    }
    return t;
}

RidgeModel model_of(std::vector<double> w, double b, bool normalized = false) {
    RidgeModel m;
    m.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    m.intercept = b;
    m.unit_normalized = normalized;
    return m;
}

}  // namespace

TEST(Cosine, Examples) {
    const std::vector<double> z{0.3, -2.0, 5.0};
    EXPECT_NEAR(cosine(z, z), 1.0, 1e-15);
    EXPECT_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
    EXPECT_NEAR(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 1}), 0.70710678118654752, 1e-15);
}

TEST(Cosine, Errors) {
    EXPECT_THROW(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 1}), NumericError);
    EXPECT_THROW(cosine(std::vector<double>{1}, std::vector<double>{1, 1}), InputError);
}

TEST(Bilinear, Examples) {
    const std::vector<double> a{1, 2}, b{3, 4};
    EXPECT_DOUBLE_EQ(bilinear_similarity(a, b, model_of({1, 1}, 0)), 11.0);
    EXPECT_DOUBLE_EQ(bilinear_similarity(a, b, model_of({1, 0.5}, 0)), 7.0);
    EXPECT_DOUBLE_EQ(bilinear_similarity(a, b, model_of({0, 0}, 2.5)), 2.5);
    EXPECT_THROW(bilinear_similarity(a, b, model_of({1, 1, 1}, 0)), InputError);
}

TEST(Bilinear, IdentityWeightsOnUnitVectorsEqualCosine) {
    const auto t = unit_normalize(random_table(30, 9, 2));
    const auto m = model_of(std::vector<double>(9, 1.0), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < t.size(); ++j) {
            EXPECT_NEAR(bilinear_similarity(t.row(i), t.row(j), m), cosine(t.row(i), t.row(j)), 1e-12);
        }
    }
}

TEST(SimilarityMatrix, CosineSpecialCases) {
    EmbeddingTable same(2);
    for (const char* n : {"a", "b", "c"}) same.add(n, std::vector<double>{0.2, 0.7});
    const auto ones = cosine_matrix(same);
    EXPECT_TRUE(ones.values.isApprox(Eigen::MatrixXd::Ones(3, 3), 1e-15));

    EmbeddingTable basis(3);
    basis.add("x", std::vector<double>{1, 0, 0});
    basis.add("y", std::vector<double>{0, 1, 0});
    basis.add("z", std::vector<double>{0, 0, 1});
    EXPECT_EQ(cosine_matrix(basis).values, Eigen::MatrixXd::Identity(3, 3));
}

TEST(SimilarityMatrix, CosinePropertiesAndSymmetry) {
    const auto m = cosine_matrix(random_table(40, 6, 3));
    EXPECT_EQ(m.kind, MatrixKind::kPredicted);
    for (Eigen::Index i = 0; i < 40; ++i) {
        EXPECT_EQ(m.values(i, i), 1.0);
        for (Eigen::Index j = 0; j < 40; ++j) {
            EXPECT_EQ(m.values(i, j), m.values(j, i));
            EXPECT_LE(std::abs(m.values(i, j)), 1.0);
        }
    }
}

TEST(SimilarityMatrix, FittedDiagonalIsSelfValue) {
    const auto t = random_table(5, 3, 4);
    const auto model = model_of({0.5, -1.0, 2.0}, 0.25);
    const auto m = fitted_matrix(t, model);
    for (std::size_t i = 0; i < 5; ++i) {
        double self = 0.25;
        for (std::size_t k = 0; k < 3; ++k) self += model.weights(static_cast<Eigen::Index>(k)) * t.row(i)[k] * t.row(i)[k];
        EXPECT_NEAR(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)), self, 1e-12);
    }
    EXPECT_EQ(m.values, m.values.transpose());
}

TEST(SimilarityMatrix, PairCount) {
    EXPECT_EQ(all_pairs(120).size(), 7140u);
    const auto p = all_pairs(4);
    ASSERT_EQ(p.size(), 6u);
    EXPECT_EQ(p[0], (PairIndex{0, 1}));
    EXPECT_EQ(p[3], (PairIndex{1, 2}));
    EXPECT_EQ(p[5], (PairIndex{2, 3}));
}

TEST(Dissimilarity, Examples) {
    SimilarityMatrix s;
    s.ids = {"a", "b", "c"};
    s.values.resize(3, 3);
    s.values << 1, 0.9, 0.5, 0.9, 1, 0.1, 0.5, 0.1, 1;
    const auto d = to_dissimilarity(s);
    EXPECT_EQ(d(0, 1), 0.0);
    EXPECT_NEAR(d(0, 2), 0.4, 1e-15);
    EXPECT_NEAR(d(1, 2), 0.8, 1e-15);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(d(i, i), 0.0);

    s.values.setConstant(0.3);
    EXPECT_EQ(to_dissimilarity(s), Eigen::MatrixXd::Zero(3, 3));

    SimilarityMatrix tiny;
    tiny.ids = {"a"};
    tiny.values = Eigen::MatrixXd::Ones(1, 1);
    EXPECT_THROW(to_dissimilarity(tiny), InputError);
}

TEST(Dissimilarity, ReversesOrdering) {
    const auto s = cosine_matrix(random_table(15, 4, 5));
    const auto d = to_dissimilarity(s);
    const auto pairs = all_pairs(15);
    for (const auto& p : pairs) {
        EXPECT_GE(d(p.i, p.j), 0.0);
        for (const auto& q : pairs) {
            if (s.values(p.i, p.j) > s.values(q.i, q.j)) EXPECT_LT(d(p.i, p.j), d(q.i, q.j));
        }
    }
}

TEST(NormalizeConcat, BlocksAreStandardized) {
    const auto a = random_table(25, 4, 6);
    const auto b = random_table(25, 7, 8);
    const std::vector<EmbeddingTable> both{a, b};
    const auto c = normalize_concat(both);
    EXPECT_EQ(c.dim(), 11u);
    const auto m = c.matrix();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double mean = m.col(k).mean();
        const double var = (m.col(k).array() - mean).square().mean();
        EXPECT_NEAR(mean, 0.0, 1e-9);
        EXPECT_NEAR(std::sqrt(var), 1.0, 1e-9);
    }
}

TEST(NormalizeConcat, PaperScaleDimensions) {
    const std::vector<EmbeddingTable> t{random_table(6, 300, 1), random_table(6, 768, 2)};
    EXPECT_EQ(normalize_concat(t).dim(), 1068u);
}

TEST(NormalizeConcat, DuplicateTableAndConstantDimension) {
    auto a = random_table(10, 3, 9);
    EmbeddingTable with_const(4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<double> v(a.row(i).begin(), a.row(i).end());
        v.push_back(7.0);
        with_const.add(a.name(i), v);
    }
    const std::vector<EmbeddingTable> two{with_const, with_const};
    const auto c = normalize_concat(two).matrix();
    EXPECT_EQ(c.leftCols(4), c.rightCols(4));
    EXPECT_TRUE(c.col(3).isZero(0.0));
}

TEST(NormalizeConcat, FollowsFirstTableOrder) {
    const auto a = random_table(5, 2, 10);
    const auto b = random_table(5, 2, 11);
    std::vector<std::string> reversed(a.names().rbegin(), a.names().rend());
    const std::vector<EmbeddingTable> t{a, align_to(b, reversed)};
    const auto c = normalize_concat(t);
    EXPECT_EQ(c.names(), a.names());
    const std::vector<EmbeddingTable> direct{a, b};
    EXPECT_EQ(c, normalize_concat(direct));
}

TEST(NormalizeConcat, Errors) {
    const auto a = random_table(5, 2, 12);
    EXPECT_THROW(normalize_concat(std::vector<EmbeddingTable>{a}), InputError);
    EXPECT_THROW(normalize_concat(std::vector<EmbeddingTable>{a, random_table(4, 2, 1)}), InputError);
    EXPECT_THROW(normalize_concat(std::vector<EmbeddingTable>{random_table(1, 2, 1), random_table(1, 2, 2)}),
                 InputError);
}

TEST(SimilarityCsv, RoundTripAndValidation) {
    const auto m = cosine_matrix(random_table(4, 3, 13));
    const auto text = write_similarity_csv(m);
    EXPECT_EQ(text.substr(0, 12), "id,s0,s1,s2,");
    const auto back = parse_similarity_csv(text, MatrixKind::kHuman);
    EXPECT_EQ(back.ids, m.ids);
    EXPECT_EQ(back.kind, MatrixKind::kHuman);
    EXPECT_TRUE(back.values.isApprox(m.values, 1e-8));
    EXPECT_EQ(write_similarity_csv(back), text);

    EXPECT_THROW(parse_similarity_csv("id,a,b\na,1,0.5\nb,0.4,1\n", MatrixKind::kHuman), InputError);
    EXPECT_THROW(parse_similarity_csv("id,a,b\na,1,0.5\n", MatrixKind::kHuman), InputError);
    EXPECT_THROW(parse_similarity_csv("id,a,b\nb,1,0.5\na,0.5,1\n", MatrixKind::kHuman), InputError);
}

TEST(AlignTo, MissingIdNamed) {
    const auto a = random_table(3, 2, 14);
    try {
        align_to(a, {"s0", "nope"});
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
    }
}

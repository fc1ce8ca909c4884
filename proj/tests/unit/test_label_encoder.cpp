#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "simjudge/errors.hpp"
#include "simjudge/label_encoder.hpp"
#include "simjudge/similarity.hpp"

using namespace simjudge;

namespace {

LabelVocabulary abc() { return LabelVocabulary({"a", "b", "c"}); }

void expect_vec(const std::vector<double>& got, const std::vector<double>& want, double tol = 1e-15) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "component " << i;
}

}  // namespace

TEST(OneHot, HotIndex) {
    const auto v = encode_one_hot("b", abc());
    EXPECT_EQ(v.hot_index, 1u);
    EXPECT_EQ(v.v, (std::vector<double>{0, 1, 0}));
    EXPECT_THROW(encode_one_hot("z", abc()), InputError);
}

TEST(OneHot, VocabularyKeepsFirstAppearanceOrder) {
    LabelVocabulary v({"dog", "cat", "dog", "eel", "cat"});
    EXPECT_EQ(v.classes(), (std::vector<std::string>{"dog", "cat", "eel"}));
}

TEST(OneHot, CosineIsIndicatorOfSameLabel) {
    const auto a1 = encode_one_hot("a", abc()).v;
    const auto a2 = encode_one_hot("a", abc()).v;
    const auto b = encode_one_hot("b", abc()).v;
    EXPECT_EQ(cosine(a1, a2), 1.0);
    EXPECT_EQ(cosine(a1, b), 0.0);
}

TEST(Smooth, EpsilonZeroIsIdentity) {
    const auto v = encode_one_hot("c", abc());
    EXPECT_EQ(smooth(v, 0.0), v.v);
}

TEST(Smooth, HandEvaluatedExamples) {
    expect_vec(smooth(encode_one_hot("a", abc()), 0.4), {0.6, 0.2, 0.2});
    LabelVocabulary five({"a", "b", "c", "d", "e"});
    expect_vec(smooth(encode_one_hot("b", five), 0.8), {0.2, 0.2, 0.2, 0.2, 0.2}, 1e-15);
}

TEST(Smooth, Errors) {
    LabelVocabulary one({"a"});
    EXPECT_THROW(smooth(encode_one_hot("a", one), 0.5), InputError);
    EXPECT_THROW(smooth(encode_one_hot("a", abc()), 1.0), InputError);
    EXPECT_THROW(smooth(encode_one_hot("a", abc()), -0.1), InputError);
}

TEST(Smooth, SumsToOneAndPreservesOrdering) {
    for (std::size_t k = 2; k <= 40; ++k) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < k; ++i) labels.push_back("c" + std::to_string(i));
        LabelVocabulary vocab(labels);
        for (double eps : {0.0, 0.1, 0.3, 0.5, 0.8, 0.95}) {
            const auto a = smooth(encode_one_hot("c0", vocab), eps);
            const auto a2 = smooth(encode_one_hot("c0", vocab), eps);
            const auto b = smooth(encode_one_hot(labels[k - 1], vocab), eps);
            EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 1.0, 1e-12);
            EXPECT_EQ(a, a2);
            const double boundary = static_cast<double>(k - 1) / static_cast<double>(k);
            if (eps < boundary - 1e-12) {
                EXPECT_GT(cosine(a, a2), cosine(a, b)) << "k=" << k << " eps=" << eps;
                EXPECT_FALSE(smoothing_degenerate(k, eps));
            } else {
                EXPECT_TRUE(smoothing_degenerate(k, eps)) << "k=" << k << " eps=" << eps;
            }
        }
    }
}

TEST(Smooth, DegenerateBoundaryGivesUniformVectors) {
    LabelVocabulary five({"a", "b", "c", "d", "e"});
    EXPECT_TRUE(smoothing_degenerate(5, 0.8));
    const auto a = smooth(encode_one_hot("a", five), 0.8);
    const auto b = smooth(encode_one_hot("d", five), 0.8);
    EXPECT_NEAR(cosine(a, b), 1.0, 1e-12);
}

TEST(EncodeLabels, TablesKeyedByStimulus) {
    StimulusSet s{"d", {"s1", "s2", "s3", "s4"}, {"cat", "dog", "cat", "eel"}};
    const auto one = encode_labels(s, LabelEncoding::kOneHot);
    EXPECT_EQ(one.table.dim(), 3u);
    EXPECT_EQ(one.table.names(), s.ids);
    EXPECT_EQ(one.table.at("s3")[0], 1.0);
    const auto sm = encode_labels(s, LabelEncoding::kSmoothedOneHot, 0.4);
    EXPECT_NEAR(sm.table.at("s2")[1], 0.6, 1e-15);
    EXPECT_NEAR(sm.table.at("s2")[0], 0.2, 1e-15);
    StimulusSet unlabeled{"d", {"s1"}, {}};
    EXPECT_THROW(encode_labels(unlabeled, LabelEncoding::kOneHot), InputError);
}

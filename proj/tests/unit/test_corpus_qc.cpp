#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "simjudge/corpus_qc.hpp"
#include "simjudge/errors.hpp"
#include "simjudge/rng.hpp"
#include "simjudge/unicode.hpp"

using namespace simjudge;

namespace {

bool has(const std::vector<QcRule>& v, QcRule r) { return std::find(v.begin(), v.end(), r) != v.end(); }

std::string random_string(Rng& rng, std::size_t max_len, bool unicode) {
    static const std::vector<std::string> alphabet{"a", "b", "c", "d", " ", "é", "ж", "😀"};
    const std::size_t len = rng.below(max_len + 1);
    const std::size_t k = unicode ? alphabet.size() : 5;
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(k)];
    return s;
}

std::vector<DescriptionRecord> participant(const std::string& id, const std::vector<std::string>& texts) {
    std::vector<DescriptionRecord> out;
    for (std::size_t t = 0; t < texts.size(); ++t) out.push_back({id, "img" + std::to_string(t), t + 1, texts[t]});
    return out;
}

// Five copies of a^100 followed by a trial with `changes` substitutions: the
// mean normalised distance at trial 6 is exactly changes / 100.
std::vector<std::string> crafted(std::size_t changes) {
    const std::string base(100, 'a');
    std::string last = base;
    for (std::size_t k = 0; k < changes; ++k) last[k * 4] = 'b';
    return {base, base, base, base, base, last};
}

}  // namespace

TEST(Validate, Examples) {
    EXPECT_TRUE(validate_description("a red fox running through snow").empty());
    EXPECT_TRUE(has(validate_description("There is a red fox here"), QcRule::kBannedPrefix));
    EXPECT_TRUE(has(validate_description("  THERE ARE two foxes in the snow"), QcRule::kBannedPrefix));
    const auto dogs = validate_description("dog dog dog dog dog");
    EXPECT_TRUE(has(dogs, QcRule::kTooFewUniqueWords));
    EXPECT_FALSE(has(dogs, QcRule::kTooFewWords));
    EXPECT_TRUE(has(validate_description("a fox in snow"), QcRule::kTooFewWords));
}

TEST(Validate, PrefixNeedsWordBoundary) {
    EXPECT_FALSE(has(validate_description("Therein is a small hidden fox"), QcRule::kBannedPrefix));
    EXPECT_FALSE(has(validate_description("there isotopes glow in a dark lab"), QcRule::kBannedPrefix));
    EXPECT_TRUE(has(validate_description("there is, honestly, a fox here"), QcRule::kBannedPrefix));
}

TEST(Validate, CaseFoldedUniqueWordsAndMinChars) {
    EXPECT_TRUE(has(validate_description("Dog DOG dog dOg cat"), QcRule::kTooFewUniqueWords));
    EXPECT_TRUE(has(validate_description("Ωμέγα ωμέγα ΩΜΈΓΑ x y"), QcRule::kTooFewUniqueWords));
    EXPECT_TRUE(has(validate_description("a b c d e"), QcRule::kTooShort));
    ValidationOptions off;
    off.min_chars = 0;
    EXPECT_TRUE(validate_description("a b c d e", off).empty());
}

TEST(Levenshtein, Examples) {
    EXPECT_EQ(levenshtein("abc", "abc"), 0u);
    EXPECT_EQ(levenshtein("", "ab"), 2u);
    EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
    EXPECT_EQ(levenshtein("é", "e"), 1u);  // one scalar, two bytes
    EXPECT_EQ(normalized_levenshtein("", ""), 0.0);
    EXPECT_EQ(normalized_levenshtein("abcd", "wxyz"), 1.0);
    EXPECT_DOUBLE_EQ(normalized_levenshtein("kitten", "sitting"), 3.0 / 7.0);
}

TEST(Levenshtein, MatchesDpOracle) {
    Rng rng(21);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto a = random_string(rng, 30, trial % 2 == 1);
        const auto b = random_string(rng, 30, trial % 2 == 1);
        ASSERT_EQ(levenshtein(a, b), oracle::dp_levenshtein(unicode::decode(a), unicode::decode(b)))
            << a << " | " << b;
    }
}

TEST(Levenshtein, MetricAxioms) {
    Rng rng(22);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_string(rng, 12, true);
        const auto b = random_string(rng, 12, true);
        const auto c = random_string(rng, 12, true);
        EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
        EXPECT_EQ(levenshtein(a, b) == 0, a == b);
        EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
        const double n = normalized_levenshtein(a, b);
        EXPECT_GE(n, 0.0);
        EXPECT_LE(n, 1.0);
    }
}

TEST(RepetitionScreen, IdenticalSentenceExcludedAtTrialSix) {
    const auto recs = participant("p", std::vector<std::string>(8, "the same sentence every single time"));
    const auto v = repetition_screen(recs);
    EXPECT_TRUE(v.excluded);
    EXPECT_EQ(v.trigger_trial, std::optional<std::size_t>(6));
    EXPECT_EQ(v.trigger_position, std::optional<std::size_t>(5));
    EXPECT_EQ(v.mean_distance[5], std::optional<double>(0.0));
}

TEST(RepetitionScreen, UnrelatedSentencesRetained) {
    const auto recs = participant("p", {"aaaaaaaaaaaaaaaaaaaa", "bbbbbbbbbbbbbbbbbbbb", "cccccccccccccccccccc",
                                        "dddddddddddddddddddd", "eeeeeeeeeeeeeeeeeeee", "ffffffffffffffffffff"});
    const auto v = repetition_screen(recs);
    EXPECT_FALSE(v.excluded);
    EXPECT_EQ(v.mean_distance[5], std::optional<double>(1.0));
}

TEST(RepetitionScreen, ThresholdIsStrict) {
    for (auto [changes, excluded] : {std::pair<std::size_t, bool>{19, true}, {21, false}, {20, false}}) {
        const auto texts = crafted(changes);
        double mean = 0;
        for (std::size_t k = 0; k < 5; ++k) {
            mean += static_cast<double>(oracle::dp_levenshtein(unicode::decode(texts[5]), unicode::decode(texts[k]))) /
                    100.0 / 5.0;
        }
        EXPECT_NEAR(mean, static_cast<double>(changes) / 100.0, 1e-12);
        const auto v = repetition_screen(participant("p", texts));
        EXPECT_EQ(v.excluded, excluded) << changes;
        EXPECT_NEAR(*v.mean_distance[5], mean, 1e-12);
    }
}

TEST(RepetitionScreen, PrefixMonotone) {
    Rng rng(23);
    const std::vector<std::string> pool{"a dog on the grass", "a dog on the grass!", "cats sleeping in the sun",
                                        "a dog on grass", "red onion sliced in half"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> texts;
        for (int k = 0; k < 12; ++k) texts.push_back(pool[rng.below(pool.size())]);
        const auto full = repetition_screen(participant("p", texts));
        for (std::size_t len = 1; len <= texts.size(); ++len) {
            const auto recs = participant("p", std::vector<std::string>(texts.begin(), texts.begin() + len));
            const auto part = repetition_screen(recs);
            if (part.excluded) {
                EXPECT_TRUE(full.excluded);
                EXPECT_EQ(full.trigger_trial, part.trigger_trial);
            }
        }
    }
}

TEST(Pool, OrderingAndEmptyImages) {
    std::vector<DescriptionRecord> recs{{"p2", "img1", 1, "t1"}, {"p1", "img1", 2, "t2"}, {"p1", "img1", 1, "t3"},
                                        {"p1", "img2", 3, "t4"}, {"p3", "img2", 1, "t5"}};
    const std::vector<std::string> all{"img1", "img2", "img3"};
    const auto pooled = pool_descriptions(recs, all);
    EXPECT_EQ(pooled.texts.at("img1"), (std::vector<std::string>{"t3", "t2", "t1"}));
    EXPECT_EQ(pooled.texts.at("img2").size(), 2u);
    EXPECT_EQ(pooled.empty_images, std::vector<std::string>{"img3"});
}

TEST(RunQc, ExcludedParticipantLeavesPools) {
    auto recs = participant("rep", std::vector<std::string>(7, "the same sentence every single time"));
    const auto ok = participant("ok", {"a brown dog runs on the beach", "two cats sleep on a red sofa",
                                       "an old stone bridge over water", "fresh green leaves of basil",
                                       "a small boat in the harbor today", "snow covered mountains at dawn",
                                       "a bowl of sliced red onion"});
    recs.insert(recs.end(), ok.begin(), ok.end());
    const auto report = run_qc(recs);
    ASSERT_EQ(report.participants.size(), 2u);
    std::size_t flagged = 0;
    for (const auto& p : report.participants) {
        if (p.excluded) {
            ++flagged;
            EXPECT_EQ(p.participant_id, "rep");
            EXPECT_EQ(p.trigger_trial, std::optional<std::size_t>(6));
        }
    }
    EXPECT_EQ(flagged, 1u);
    const auto accepted = report.accepted();
    EXPECT_EQ(std::count_if(accepted.begin(), accepted.end(), [](auto& r) { return r.participant_id == "rep"; }), 5);
    EXPECT_EQ(std::count_if(accepted.begin(), accepted.end(), [](auto& r) { return r.participant_id == "ok"; }), 7);
    std::size_t total = 0;
    for (const auto& [img, n] : report.accepted_per_image) total += n;
    EXPECT_EQ(total, accepted.size());
    const auto j = nlohmann::json::parse(qc_report_to_json(report));
    EXPECT_TRUE(j.contains("participants"));
}

TEST(DescriptionsCsv, RoundTripAndErrors) {
    const std::vector<DescriptionRecord> recs{{"p1", "img1", 1, "hello, \"world\"\nsecond line"}, {"p1", "img2", 2, "x"}};
    EXPECT_EQ(parse_descriptions_csv(write_descriptions_csv(recs)).size(), 2u);
    EXPECT_EQ(parse_descriptions_csv(write_descriptions_csv(recs))[0].text, recs[0].text);
    EXPECT_TRUE(parse_descriptions_csv("participant_id,image_id,trial_index,text\n").empty());
    try {
        parse_descriptions_csv("participant_id,image_id,text\np,i,t\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("trial_index"), std::string::npos);
    }
    EXPECT_THROW(parse_descriptions_csv("participant_id,image_id,trial_index,text\np,i,0,t\n"), InputError);
    EXPECT_THROW(parse_descriptions_csv("participant_id,image_id,trial_index,text\np,i,x,t\n"), InputError);
    EXPECT_THROW(parse_descriptions_csv("participant_id,image_id,trial_index,text\np,i,1,t\np,j,1,u\n"), InputError);
}

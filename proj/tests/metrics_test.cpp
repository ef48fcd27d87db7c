#include <gtest/gtest.h>

#include <chrono>

#include "regex_forge/metrics.hpp"
#include "regex_forge/stats.hpp"
#include "support/random_regex.hpp"
#include "support/reference_matcher.hpp"

namespace regex_forge {
namespace {

const char* kIpv4Ground = R"(^127\.(?:(?:25[0-5]|2[0-4]\d|1?\d?\d)\.){2}(?:25[0-5]|2[0-4]\d|1?\d?\d)$)";
const char* kIpv4Reuse = R"(^127(?:\.(?:25[0-5]|2[0-4][\d]|[01]?[\d][\d]?)){3}$)";

TEST(Accuracy, Examples) {
    EXPECT_DOUBLE_EQ(accuracy(parse("a"), {"a"}, {"ba"}, MatchMode::Partial), 0.5);
    EXPECT_DOUBLE_EQ(accuracy(parse("a"), {"a"}, {"ba"}, MatchMode::Full), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(parse(kIpv4Ground), {"127.0.0.1"}, {"128.0.0.1"}, MatchMode::Partial), 1.0);
    EXPECT_THROW(accuracy(parse("a"), {}, {}, MatchMode::Partial), std::invalid_argument);
}

TEST(Accuracy, TimeoutsLeaveExamplesUnsatisfied) {
    const std::string evil = std::string(30, 'a') + "b";
    const AccuracyResult r =
        evaluate_accuracy(CompiledRegex(parse("(a+)+$")), {"aaa"}, {evil}, MatchMode::Partial);
    EXPECT_EQ(r.timeouts, 1u);
    EXPECT_EQ(r.satisfied, 1u);
    EXPECT_DOUBLE_EQ(r.value, 0.5);
}

TEST(Accuracy, EqualsVerdictCountingOracle) {
    testing::GenOptions opt;
    opt.alphabet = "abc01";
    testing::RegexGen gen(2024, opt);
    for (int k = 0; k < 300; ++k) {
        const RegexAst ast = gen.ast();
        std::vector<std::string> pos, neg;
        for (std::size_t n = 1 + gen.pick(4); n > 0; --n) pos.push_back(gen.string_over("abc01", 5));
        for (std::size_t n = gen.pick(4); n > 0; --n) neg.push_back(gen.string_over("abc01", 5));
        const MatchMode mode = gen.coin(0.5) ? MatchMode::Partial : MatchMode::Full;
        auto hit = [&](const std::string& s) {
            return mode == MatchMode::Full ? testing::reference_full_match(ast, to_u32(s))
                                           : testing::reference_partial_match(ast, to_u32(s));
        };
        std::size_t good = 0;
        for (const auto& s : pos) good += hit(s) ? 1 : 0;
        for (const auto& s : neg) good += hit(s) ? 0 : 1;
        const double expected = static_cast<double>(good) / static_cast<double>(pos.size() + neg.size());
        ASSERT_EQ(accuracy(ast, pos, neg, mode), expected) << render(ast);
    }
}

TEST(SemanticSimilarity, Examples) {
    EXPECT_EQ(semantic_similarity(parse("^a$"), parse("^a$")), 1.0);
    EXPECT_EQ(semantic_similarity(parse("^a$"), parse("^b$")), 0.0);
    EXPECT_EQ(semantic_similarity(parse("^ab?$"), parse("^a$")), 0.5);
    EXPECT_EQ(semantic_similarity(parse("a^b"), parse("b^a")), 1.0);  // both languages empty
    EXPECT_FALSE(semantic_similarity(parse(R"((a)\1)"), parse("a")).has_value());
}

TEST(SemanticSimilarity, SymmetricAndBounded) {
    testing::RegexGen gen(31, {});
    for (int k = 0; k < 200; ++k) {
        const RegexAst a = gen.ast(), b = gen.ast();
        const auto ab = semantic_similarity(a, b), ba = semantic_similarity(b, a);
        ASSERT_TRUE(ab && ba);
        ASSERT_EQ(*ab, *ba);
        ASSERT_GE(*ab, 0.0);
        ASSERT_LE(*ab, 1.0);
        ASSERT_EQ(*semantic_similarity(a, a), 1.0);
    }
}

TEST(MeasureCandidate, SelfComparison) {
    CompositionTask task{"ipv4", kIpv4Ground, {"127.0.0.1", "127.1.2.3"}, {"128.0.0.1", "127.0.0.999"}, TaskSource::Oss};
    const MetricBundle b = measure_candidate(kIpv4Ground, task, std::chrono::milliseconds(3));
    EXPECT_EQ(b.accuracy, 1.0);
    EXPECT_EQ(b.ted_to_ground, 0u);
    EXPECT_EQ(b.semantic_similarity, 1.0);
    EXPECT_EQ(b.generation_time, std::chrono::milliseconds(3));
}

TEST(MeasureCandidate, ReusedIpv4Candidate) {
    CompositionTask task{"ipv4", kIpv4Ground, {"127.0.0.1", "127.1.2.3"}, {"128.0.0.1", "127.0.0.999"}, TaskSource::Oss};
    const MetricBundle b = measure_candidate(kIpv4Reuse, task, {});
    EXPECT_EQ(b.accuracy, 1.0);
    EXPECT_EQ(b.pattern_length, 51u);
    ASSERT_TRUE(b.nfa_size && b.ted_to_ground && b.semantic_similarity && b.strictness);
    EXPECT_GT(*b.ted_to_ground, 0u);
    EXPECT_GT(*b.strictness, 0.0);
    EXPECT_LE(*b.strictness, 1.0);
    EXPECT_GT(*b.semantic_similarity, 0.0);
}

TEST(MeasureCandidate, ExtendedCandidateHasNoAutomatonFields) {
    CompositionTask task{"t", "^aa$", {"aa"}, {"ab"}, TaskSource::RegexLib};
    const MetricBundle b = measure_candidate(R"((a)\1)", task, {});
    EXPECT_FALSE(b.nfa_size);
    EXPECT_FALSE(b.strictness);
    EXPECT_FALSE(b.semantic_similarity);
    EXPECT_TRUE(b.ted_to_ground);
    EXPECT_EQ(b.accuracy, 1.0);
    EXPECT_THROW(measure_candidate("(a", task, {}), ParseError);
}

TEST(Stats, Percentiles) {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    EXPECT_NEAR(*percentile(v, 10), 10.9, 1e-12);
    EXPECT_NEAR(*percentile(v, 90), 90.1, 1e-12);
    EXPECT_EQ(*median(v), 50.5);
    EXPECT_FALSE(percentile({}, 50));
    EXPECT_EQ(*percentile({7}, 10), 7.0);
}

TEST(Stats, Variance) {
    EXPECT_FALSE(population_variance({1.0}));
    EXPECT_EQ(*population_variance({1.0, 3.0}), 1.0);
    EXPECT_EQ(*mean({1.0, 2.0, 6.0}), 3.0);
}

}  // namespace
}  // namespace regex_forge

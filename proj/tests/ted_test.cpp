#include <gtest/gtest.h>

#include <random>

#include "regex_forge/parser.hpp"
#include "regex_forge/tree_edit_distance.hpp"
#include "support/random_regex.hpp"
#include "support/ted_oracle.hpp"

namespace regex_forge {
namespace {

std::size_t ted(const char* a, const char* b) { return syntactic_distance(parse(a), parse(b)); }

TEST(SyntacticDistance, Examples) {
    EXPECT_EQ(ted("a", "a"), 0u);
    EXPECT_EQ(ted("a", "b"), 1u);
    EXPECT_EQ(ted("a", "ab"),
              testing::exhaustive_tree_distance(labeled_tree(parse("a").root), labeled_tree(parse("ab").root)));
    EXPECT_EQ(ted("a", "ab"), 2u);
    EXPECT_EQ(ted("^a$", "^b$"), 1u);
}

TEST(SyntacticDistance, PayloadCanonicalization) {
    EXPECT_EQ(ted("[a-c]", "[abc]"), 0u);
    EXPECT_EQ(ted("[ba]", "[ab]"), 0u);
    EXPECT_EQ(ted("[a-c]", "[^a-c]"), 1u);
    EXPECT_EQ(ted("a{1}", "a"), 1u);
    EXPECT_EQ(ted("a{1,1}", "a{1}"), 0u);
    EXPECT_EQ(ted("a*", "a*?"), 1u);
    EXPECT_EQ(ted("a*", "a{0,}"), 0u);
}

TEST(SyntacticDistance, MatchesExhaustiveSearchOnRandomTrees) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 300; ++k) {
        const auto a = testing::random_tree(rng, 1 + rng() % 6, "xyz");
        const auto b = testing::random_tree(rng, 1 + rng() % 6, "xyz");
        ASSERT_EQ(tree_edit_distance(a, b), testing::exhaustive_tree_distance(a, b)) << "pair " << k;
    }
}

TEST(SyntacticDistance, MatchesExhaustiveSearchOnSmallAsts) {
    testing::GenOptions opt;
    opt.max_depth = 3;
    testing::RegexGen gen(5, opt);
    int checked = 0;
    while (checked < 100) {
        const RegexAst a = gen.ast(), b = gen.ast();
        const LabeledTree ta = labeled_tree(a.root), tb = labeled_tree(b.root);
        if (ta.size() > 6 || tb.size() > 6) continue;
        ASSERT_EQ(tree_edit_distance(ta, tb), testing::exhaustive_tree_distance(ta, tb))
            << render(a) << " vs " << render(b);
        ++checked;
    }
}

TEST(SyntacticDistance, MetricAxioms) {
    testing::RegexGen gen(99, {});
    for (int k = 0; k < 300; ++k) {
        const RegexAst a = gen.ast(), b = gen.ast(), c = gen.ast();
        const std::size_t ab = syntactic_distance(a, b), ba = syntactic_distance(b, a);
        const std::size_t bc = syntactic_distance(b, c), ac = syntactic_distance(a, c);
        ASSERT_EQ(syntactic_distance(a, a), 0u);
        ASSERT_EQ(ab, ba);
        ASSERT_LE(ac, ab + bc);
        ASSERT_LE(ab, node_count(a.root) + node_count(b.root));
    }
}

TEST(SyntacticDistance, EmptyTrees) {
    std::mt19937_64 rng(1);
    const LabeledTree empty;
    const auto t = testing::random_tree(rng, 4, "x");
    EXPECT_EQ(tree_edit_distance(empty, t), 4u);
    EXPECT_EQ(tree_edit_distance(t, empty), 4u);
}

}  // namespace
}  // namespace regex_forge

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "regex_forge/corpus.hpp"
#include "regex_forge/prefilter.hpp"
#include "support/random_regex.hpp"
#include "support/reference_matcher.hpp"
#include "support/temp_dir.hpp"

namespace regex_forge {
namespace {

std::string record(const std::string& pattern, const char* source, const char* origin) {
    return nlohmann::json{{"pattern", pattern}, {"source", source}, {"origin", origin}}.dump() + "\n";
}

TEST(Ingest, DeduplicatesAcrossSources) {
    CorpusStore store = CorpusStore::in_memory();
    std::istringstream in(record("^\\d+$", "oss-project", "repo/a") + record("^\\d+$", "so-post", "post/1"));
    const IngestReport r = store.ingest(in);
    EXPECT_EQ(r.records, 2u);
    EXPECT_EQ(store.size(), 1u);
    const StoredEntry* e = store.find_pattern("^\\d+$");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->entry.provenance.size(), 2u);
    EXPECT_EQ(e->entry.source(), CorpusSource::OssProject);
    EXPECT_EQ(e->entry.id, pattern_id("^\\d+$"));
    EXPECT_EQ(e->entry.parse_status, ParseStatus::Ok);
    EXPECT_EQ(e->entry.regularity, RegularityClass::Regular);
}

TEST(Ingest, StatusAndSkippedRecords) {
    CorpusStore store = CorpusStore::in_memory();
    std::istringstream in(record("(a", "regexlib", "x") + record("(?P<n>a)(?(n)b|c)", "regexlib", "x") +
                          record("(a)\\1", "so-comment", "c/1") + "not json\n" +
                          R"({"pattern": 5, "source": "oss-project"})" "\n" +
                          R"({"pattern": "a", "source": "github"})" "\n\n");
    const IngestReport r = store.ingest(in);
    EXPECT_EQ(r.records, 6u);
    EXPECT_EQ(r.skipped, 3u);
    EXPECT_EQ(store.find_pattern("(a")->entry.parse_status, ParseStatus::ParseError);
    EXPECT_FALSE(store.find_pattern("(a")->entry.regularity);
    EXPECT_EQ(store.find_pattern("(?P<n>a)(?(n)b|c)")->entry.parse_status, ParseStatus::Unsupported);
    EXPECT_EQ(store.find_pattern("(a)\\1")->entry.regularity, RegularityClass::Extended);
    const auto scanned = store.view().scan();
    ASSERT_EQ(scanned.size(), 1u);
    EXPECT_EQ(scanned[0]->entry.pattern, "(a)\\1");
}

TEST(Ingest, DefaultSourceAndIdempotence) {
    CorpusStore store = CorpusStore::in_memory();
    const std::string stream = R"({"pattern": "a+", "origin": "r1"})" "\n" + record("b", "regexlib", "r2") +
                               record("a+", "oss-project", "r3");
    std::istringstream first(stream);
    store.ingest(first, CorpusSource::OssProject);
    const CorpusStats before = store.stats();
    std::istringstream again(stream);
    const IngestReport r = store.ingest(again, CorpusSource::OssProject);
    EXPECT_EQ(r.new_entries, 0u);
    EXPECT_EQ(r.new_provenance, 0u);
    for (std::size_t s = 0; s < kCorpusSourceCount; ++s) {
        EXPECT_EQ(store.stats().per_source[s].found, before.per_source[s].found);
        EXPECT_EQ(store.stats().per_source[s].unique, before.per_source[s].unique);
    }
}

TEST(Ingest, StatsColumns) {
    CorpusStore store = CorpusStore::in_memory();
    std::istringstream in(record("a", "oss-project", "r1") + record("b", "oss-project", "r1") +
                          record("a", "regexlib", "lib/1") + record("c", "regexlib", "lib/2"));
    store.ingest(in);
    const auto& oss = store.stats().per_source[0];
    const auto& lib = store.stats().per_source[1];
    EXPECT_EQ(oss.targets, 1u);
    EXPECT_EQ(oss.found, 2u);
    EXPECT_EQ(oss.unique, 2u);
    EXPECT_EQ(lib.targets, 2u);
    EXPECT_EQ(lib.found, 2u);
    EXPECT_EQ(lib.unique, 1u);
    const SourceStats total = store.stats().total();
    EXPECT_EQ(total.unique, store.size());
    EXPECT_EQ(total.found, 4u);
    for (const auto& s : store.stats().per_source) EXPECT_LE(s.unique, s.found);
}

TEST(Persistence, RoundTripAndAppend) {
    testing::TempDir tmp;
    const auto dir = tmp.path() / "store";
    {
        CorpusStore store = CorpusStore::create(dir, 3);
        std::istringstream in(record("^\\d+$", "oss-project", "r1") + record("abc", "regexlib", "l1"));
        store.ingest(in);
    }
    {
        CorpusStore store = CorpusStore::open(dir);
        EXPECT_EQ(store.shard_count(), 3u);
        EXPECT_EQ(store.size(), 2u);
        std::istringstream in(record("abc", "so-post", "p9") + record("x|y", "so-comment", "c1"));
        store.ingest(in);
    }
    const CorpusStore store = CorpusStore::open(dir);
    EXPECT_EQ(store.size(), 3u);
    EXPECT_EQ(store.find_pattern("abc")->entry.provenance.size(), 2u);
    EXPECT_EQ(store.stats().total().found, 4u);
    EXPECT_TRUE(std::filesystem::exists(dir / "shards" / "00.seg"));
    EXPECT_TRUE(std::filesystem::exists(dir / "shards" / "02.seg"));
    EXPECT_THROW(CorpusStore::create(dir), StoreError);
    EXPECT_THROW(CorpusStore::open(tmp.path() / "missing"), StoreError);
}

TEST(Persistence, UncommittedBytesAreIgnored) {
    testing::TempDir tmp;
    const auto dir = tmp.path() / "store";
    {
        CorpusStore store = CorpusStore::create(dir, 1);
        std::istringstream in(record("a", "oss-project", "r"));
        store.ingest(in);
    }
    // Simulate a crash after appending but before the manifest was replaced.
    {
        std::ofstream seg(dir / "shards" / "00.seg", std::ios::binary | std::ios::app);
        seg << "garbage that was never committed";
    }
    CorpusStore store = CorpusStore::open(dir);
    EXPECT_EQ(store.size(), 1u);
    std::istringstream in(record("b", "oss-project", "r"));
    store.ingest(in);
    EXPECT_EQ(CorpusStore::open(dir).size(), 2u);
}

TEST(Persistence, FailedReadLeavesStoreUnchanged) {
    CorpusStore store = CorpusStore::in_memory();
    std::istringstream ok(record("a", "oss-project", "r"));
    store.ingest(ok);
    std::istringstream broken(record("b", "oss-project", "r"));
    broken.setstate(std::ios::badbit);
    EXPECT_THROW(store.ingest(broken), StoreError);
    EXPECT_EQ(store.size(), 1u);
}

TEST(View, ScanOrderFiltersAndExclusion) {
    CorpusStore store = CorpusStore::in_memory();
    std::istringstream in(record("a", "oss-project", "r") + record("b", "regexlib", "l") + record("c", "so-post", "p") +
                          record("b", "so-post", "p"));
    store.ingest(in);
    const auto all = store.view().scan();
    ASSERT_EQ(all.size(), 3u);
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end(),
                               [](const StoredEntry* x, const StoredEntry* y) { return x->entry.id < y->entry.id; }));
    const auto oss = store.view().with_sources(source_bit(CorpusSource::OssProject)).scan();
    ASSERT_EQ(oss.size(), 1u);
    EXPECT_EQ(oss[0]->entry.pattern, "a");
    EXPECT_EQ(store.view().with_sources(source_bit(CorpusSource::SoPost)).scan().size(), 2u);
    const CorpusView without_b = store.view().exclude("b");
    EXPECT_EQ(without_b.scan().size(), 2u);
    EXPECT_EQ(store.view().scan().size(), 3u);
    EXPECT_EQ(store.view().exclude("zzz").scan().size(), 3u);
}

TEST(Prefilter, FactsExamples) {
    auto facts = [](const char* p) { return pattern_facts(parse(p)); };
    EXPECT_EQ(facts("abc").required_literals, std::vector<std::string>{"abc"});
    EXPECT_EQ(facts("abc").min_length, 3u);
    EXPECT_EQ(facts("abc").max_length, 3u);
    EXPECT_EQ(facts(R"(\w+@\w+\.com)").required_literals, (std::vector<std::string>{".com", "@"}));
    EXPECT_FALSE(facts(R"(\w+@)").max_length);
    EXPECT_TRUE(facts("ab|ac").required_literals.empty());
    EXPECT_EQ(facts("x(ab|cb)y").required_literals, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(facts("(?:foo)?bar").required_literals, std::vector<std::string>{"bar"});
    EXPECT_EQ(facts("(?:ab){3}").required_literals, (std::vector<std::string>{"ab", "ababab"}));
    EXPECT_EQ(facts("(?i)a1b").required_literals, std::vector<std::string>{"1"});
    EXPECT_TRUE(facts("(?i)abc").required_literals.empty());
    EXPECT_EQ(facts("a{2,5}").min_length, 2u);
    EXPECT_EQ(facts("a{2,5}").max_length, 5u);
    EXPECT_EQ(facts("(?=abc)a").min_length, 1u);
}

TEST(Prefilter, NeverRejectsAMatchingPattern) {
    testing::GenOptions opt;
    opt.alphabet = "aB.@";
    opt.case_insensitive = true;
    testing::RegexGen gen(123, opt);
    for (int k = 0; k < 400; ++k) {
        const RegexAst ast = gen.ast();
        const PatternFacts facts = pattern_facts(ast);
        for (const std::string& x : testing::all_strings("aAbB.@", 3)) {
            for (MatchMode mode : {MatchMode::Partial, MatchMode::Full}) {
                const bool hit = mode == MatchMode::Full ? testing::reference_full_match(ast, to_u32(x))
                                                         : testing::reference_partial_match(ast, to_u32(x));
                if (hit) ASSERT_TRUE(may_satisfy(facts, {{x}, mode})) << render(ast) << " on " << x;
            }
        }
    }
}

}  // namespace
}  // namespace regex_forge

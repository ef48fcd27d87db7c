#ifndef REGEX_FORGE_CORPUS_HPP
#define REGEX_FORGE_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "regex_forge/features.hpp"
#include "regex_forge/matcher.hpp"
#include "regex_forge/parser.hpp"
#include "regex_forge/prefilter.hpp"

namespace regex_forge {

enum class CorpusSource : std::uint8_t { OssProject, RegexLib, SoPost, SoComment };
inline constexpr std::size_t kCorpusSourceCount = 4;

constexpr std::string_view corpus_source_name(CorpusSource s) {
    constexpr std::array<std::string_view, kCorpusSourceCount> names = {"oss-project", "regexlib", "so-post",
                                                                        "so-comment"};
    return names[static_cast<std::size_t>(s)];
}

inline std::optional<CorpusSource> parse_corpus_source(std::string_view s) {
    for (std::size_t k = 0; k < kCorpusSourceCount; ++k) {
        if (corpus_source_name(static_cast<CorpusSource>(k)) == s) return static_cast<CorpusSource>(k);
    }
    return std::nullopt;
}

/// Bit set over CorpusSource.
using SourceMask = std::uint8_t;
inline constexpr SourceMask kAllSources = 0x0F;
constexpr SourceMask source_bit(CorpusSource s) { return static_cast<SourceMask>(1u << static_cast<unsigned>(s)); }

enum class ParseStatus : std::uint8_t { Ok, ParseError, Unsupported };

constexpr std::string_view parse_status_name(ParseStatus s) {
    switch (s) {
        case ParseStatus::Ok: return "ok";
        case ParseStatus::ParseError: return "parse-error";
        case ParseStatus::Unsupported: return "unsupported";
    }
    return "?";
}

/// FNV-1a over the pattern bytes.
inline std::uint64_t pattern_id(std::string_view pattern) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : pattern) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Provenance {
    CorpusSource source = CorpusSource::OssProject;
    std::string origin;

    bool operator==(const Provenance&) const = default;
};

struct RegexEntry {
    std::uint64_t id = 0;
    std::string pattern;
    std::vector<Provenance> provenance;  // first record is where the pattern was first seen
    ParseStatus parse_status = ParseStatus::ParseError;
    std::optional<RegularityClass> regularity;

    CorpusSource source() const { return provenance.front().source; }
    const std::string& origin() const { return provenance.front().origin; }
    bool from_any(SourceMask mask) const {
        return std::any_of(provenance.begin(), provenance.end(),
                           [&](const Provenance& p) { return (mask & source_bit(p.source)) != 0; });
    }
};

struct SourceStats {
    std::size_t targets = 0;  // distinct origins examined
    std::size_t found = 0;    // provenance records
    std::size_t unique = 0;   // entries first contributed by this source
};

struct CorpusStats {
    std::array<SourceStats, kCorpusSourceCount> per_source{};

    SourceStats total() const {
        SourceStats t;
        for (const SourceStats& s : per_source) {
            t.targets += s.targets;
            t.found += s.found;
            t.unique += s.unique;
        }
        return t;
    }
};

/// A corpus entry with the artifacts a scan needs, built once at load.
struct StoredEntry {
    RegexEntry entry;
    CompiledRegex program;
    PatternFacts facts;
};

struct IngestReport {
    std::size_t records = 0;
    std::size_t skipped = 0;  // schema violations
    std::size_t new_entries = 0;
    std::size_t new_provenance = 0;
    CorpusStats stats;
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorpusView;

namespace detail {

inline void classify(StoredEntry& e) {
    try {
        const RegexAst ast = parse(e.entry.pattern);
        e.entry.parse_status = ParseStatus::Ok;
        e.entry.regularity = classify_regularity(ast);
        e.program = CompiledRegex(ast);
        e.facts = pattern_facts(ast);
    } catch (const ParseError& err) {
        e.entry.parse_status = err.unsupported() ? ParseStatus::Unsupported : ParseStatus::ParseError;
        e.entry.regularity.reset();
    }
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n / 256));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Segment record: id u64, pattern (u32 length + bytes), provenance count u32,
// then per provenance: source u8, origin (u32 length + bytes). Records with a
// known id only add provenance.
inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}
inline void put_u64(std::string& out, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}
inline void put_bytes(std::string& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}
    bool done() const { return pos_ >= data_.size(); }
    std::uint64_t u(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int k = 0; k < bytes; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * k);
        return v;
    }
    std::string bytes() {
        const auto n = static_cast<std::size_t>(u(4));
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw StoreError("truncated segment file");
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& p, std::uintmax_t limit) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StoreError("cannot read " + p.string());
    std::string data(static_cast<std::size_t>(limit), '\0');
    in.read(data.data(), static_cast<std::streamsize>(limit));
    if (static_cast<std::uintmax_t>(in.gcount()) != limit) throw StoreError("segment shorter than manifest: " + p.string());
    return data;
}

}  // namespace detail

/// Deduplicated regex corpus. Entries are kept sorted by id. A store opened
/// from a directory persists every ingest; an in-memory store does not.
class CorpusStore {
public:
    static constexpr int kFormatVersion = 1;

    static CorpusStore in_memory() { return CorpusStore(); }

    /// Creates an empty store directory. Fails if the directory exists.
    static CorpusStore create(const std::filesystem::path& dir, std::size_t shard_count = 0) {
        namespace fs = std::filesystem;
        if (fs::exists(dir)) throw StoreError("store already exists: " + dir.string());
        if (shard_count == 0) shard_count = std::max(1u, std::thread::hardware_concurrency());
        const fs::path tmp = dir.string() + ".tmp-create";
        fs::remove_all(tmp);
        fs::create_directories(tmp / "shards");
        for (std::size_t s = 0; s < shard_count; ++s) std::ofstream(tmp / "shards" / shard_name(s), std::ios::binary);
        CorpusStore store;
        store.dir_ = tmp;
        store.shard_bytes_.assign(shard_count, 0);
        store.write_manifest();
        fs::rename(tmp, dir);
        store.dir_ = dir;
        return store;
    }

    static CorpusStore open(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        const fs::path manifest = dir / "manifest.json";
        if (!fs::exists(manifest)) throw StoreError("no corpus store at " + dir.string());
        nlohmann::json m;
        try {
            std::ifstream in(manifest);
            m = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw StoreError(std::string("corrupt manifest: ") + e.what());
        }
        if (m.value("version", 0) != kFormatVersion) throw StoreError("unsupported store version");
        CorpusStore store;
        store.dir_ = dir;
        for (const auto& b : m.at("shard_bytes")) store.shard_bytes_.push_back(b.get<std::uintmax_t>());
        std::vector<StoredEntry> loaded;
        std::unordered_map<std::uint64_t, std::size_t> at;
        for (std::size_t s = 0; s < store.shard_bytes_.size(); ++s) {
            const std::string data = detail::read_file(dir / "shards" / shard_name(s), store.shard_bytes_[s]);
            detail::Reader r(data);
            while (!r.done()) {
                const std::uint64_t id = r.u(8);
                std::string pattern = r.bytes();
                const auto n = static_cast<std::size_t>(r.u(4));
                std::vector<Provenance> prov;
                for (std::size_t k = 0; k < n; ++k) {
                    const auto src = static_cast<std::size_t>(r.u(1));
                    if (src >= kCorpusSourceCount) throw StoreError("bad source tag in segment");
                    prov.push_back({static_cast<CorpusSource>(src), r.bytes()});
                }
                auto it = at.find(id);
                if (it == at.end()) {
                    at.emplace(id, loaded.size());
                    StoredEntry e;
                    e.entry.id = id;
                    e.entry.pattern = std::move(pattern);
                    e.entry.provenance = std::move(prov);
                    loaded.push_back(std::move(e));
                } else {
                    auto& dst = loaded[it->second].entry.provenance;
                    for (auto& p : prov) {
                        if (std::find(dst.begin(), dst.end(), p) == dst.end()) dst.push_back(std::move(p));
                    }
                }
            }
        }
        detail::parallel_for(loaded.size(), [&](std::size_t i) { detail::classify(loaded[i]); });
        store.adopt(std::move(loaded));
        return store;
    }

    static CorpusStore open_or_create(const std::filesystem::path& dir, std::size_t shard_count = 0) {
        return std::filesystem::exists(dir / "manifest.json") ? open(dir) : create(dir, shard_count);
    }

    /// Adds JSONL records {"pattern","source","origin"}. Records without a
    /// source take default_source. Malformed lines are skipped and counted.
    /// An I/O failure leaves both the directory and this object unchanged.
    IngestReport ingest(std::istream& in, std::optional<CorpusSource> default_source = std::nullopt) {
        IngestReport report;
        std::vector<std::pair<std::string, Provenance>> records;
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ++report.records;
            auto rec = parse_record(line, default_source);
            if (!rec) {
                ++report.skipped;
                continue;
            }
            records.push_back(std::move(*rec));
        }
        if (in.bad()) throw StoreError("read failure while ingesting");

        // Stage the changes, then write, then apply.
        std::unordered_map<std::uint64_t, std::size_t> staged_at;
        std::vector<StoredEntry> fresh;
        std::vector<std::pair<std::uint64_t, Provenance>> extra;  // provenance for existing ids
        std::set<std::pair<std::uint64_t, std::pair<int, std::string>>> seen_extra;
        for (auto& [pattern, prov] : records) {
            const std::uint64_t id = pattern_id(pattern);
            if (const StoredEntry* existing = find(id)) {
                const auto& have = existing->entry.provenance;
                if (std::find(have.begin(), have.end(), prov) != have.end()) continue;
                if (!seen_extra.insert({id, {static_cast<int>(prov.source), prov.origin}}).second) continue;
                extra.emplace_back(id, prov);
                continue;
            }
            auto it = staged_at.find(id);
            if (it == staged_at.end()) {
                staged_at.emplace(id, fresh.size());
                StoredEntry e;
                e.entry.id = id;
                e.entry.pattern = std::move(pattern);
                e.entry.provenance.push_back(std::move(prov));
                fresh.push_back(std::move(e));
            } else {
                auto& have = fresh[it->second].entry.provenance;
                if (std::find(have.begin(), have.end(), prov) == have.end()) have.push_back(std::move(prov));
            }
        }
        report.new_entries = fresh.size();
        for (const auto& e : fresh) report.new_provenance += e.entry.provenance.size();
        report.new_provenance += extra.size();

        if (!dir_.empty() && (!fresh.empty() || !extra.empty())) persist(fresh, extra);

        detail::parallel_for(fresh.size(), [&](std::size_t i) { detail::classify(fresh[i]); });
        std::vector<StoredEntry> all = std::move(entries_);
        for (auto& [id, prov] : extra) {
            auto pos = std::lower_bound(all.begin(), all.end(), id,
                                        [](const StoredEntry& e, std::uint64_t v) { return e.entry.id < v; });
            pos->entry.provenance.push_back(std::move(prov));
        }
        for (auto& e : fresh) all.push_back(std::move(e));
        adopt(std::move(all));
        report.stats = stats_;
        return report;
    }

    /// Single-record convenience for building stores in code.
    void add(std::string pattern, CorpusSource source, std::string origin) {
        nlohmann::json j = {{"pattern", std::move(pattern)},
                            {"source", corpus_source_name(source)},
                            {"origin", std::move(origin)}};
        std::istringstream in(j.dump());
        ingest(in);
    }

    const CorpusStats& stats() const { return stats_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<StoredEntry>& entries() const { return entries_; }
    std::size_t shard_count() const { return shard_bytes_.empty() ? 1 : shard_bytes_.size(); }
    const std::filesystem::path& directory() const { return dir_; }

    const StoredEntry* find(std::uint64_t id) const {
        auto pos = std::lower_bound(entries_.begin(), entries_.end(), id,
                                    [](const StoredEntry& e, std::uint64_t v) { return e.entry.id < v; });
        return pos != entries_.end() && pos->entry.id == id ? &*pos : nullptr;
    }

    const StoredEntry* find_pattern(std::string_view pattern) const {
        const StoredEntry* e = find(pattern_id(pattern));
        return e && e->entry.pattern == pattern ? e : nullptr;
    }

    CorpusView view() const;

private:
    CorpusStore() = default;

    static std::string shard_name(std::size_t s) {
        std::string n = std::to_string(s);
        if (n.size() < 2) n.insert(0, 2 - n.size(), '0');
        return n + ".seg";
    }

    static std::optional<std::pair<std::string, Provenance>> parse_record(const std::string& line,
                                                                         std::optional<CorpusSource> fallback) {
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return std::nullopt;
        auto pattern = j.find("pattern");
        if (pattern == j.end() || !pattern->is_string()) return std::nullopt;
        std::optional<CorpusSource> source = fallback;
        if (auto s = j.find("source"); s != j.end()) {
            if (!s->is_string()) return std::nullopt;
            source = parse_corpus_source(s->get<std::string>());
        }
        if (!source) return std::nullopt;
        std::string origin;
        if (auto o = j.find("origin"); o != j.end()) {
            if (!o->is_string()) return std::nullopt;
            origin = o->get<std::string>();
        }
        return std::pair{pattern->get<std::string>(), Provenance{*source, std::move(origin)}};
    }

    void adopt(std::vector<StoredEntry> all) {
        std::sort(all.begin(), all.end(), [](const StoredEntry& a, const StoredEntry& b) { return a.entry.id < b.entry.id; });
        entries_ = std::move(all);
        stats_ = CorpusStats{};
        std::array<std::unordered_set<std::string>, kCorpusSourceCount> origins;
        for (const StoredEntry& e : entries_) {
            ++stats_.per_source[static_cast<std::size_t>(e.entry.source())].unique;
            for (const Provenance& p : e.entry.provenance) {
                ++stats_.per_source[static_cast<std::size_t>(p.source)].found;
                origins[static_cast<std::size_t>(p.source)].insert(p.origin);
            }
        }
        for (std::size_t s = 0; s < kCorpusSourceCount; ++s) stats_.per_source[s].targets = origins[s].size();
    }

    void persist(const std::vector<StoredEntry>& fresh, const std::vector<std::pair<std::uint64_t, Provenance>>& extra) {
        namespace fs = std::filesystem;
        const std::size_t shards = shard_bytes_.size();
        std::vector<std::string> chunks(shards);
        auto put = [&](std::uint64_t id, std::string_view pattern, const std::vector<const Provenance*>& prov) {
            std::string& out = chunks[id % shards];
            detail::put_u64(out, id);
            detail::put_bytes(out, pattern);
            detail::put_u32(out, static_cast<std::uint32_t>(prov.size()));
            for (const Provenance* p : prov) {
                out.push_back(static_cast<char>(p->source));
                detail::put_bytes(out, p->origin);
            }
        };
        for (const StoredEntry& e : fresh) {
            std::vector<const Provenance*> prov;
            for (const auto& p : e.entry.provenance) prov.push_back(&p);
            put(e.entry.id, e.entry.pattern, prov);
        }
        for (const auto& [id, p] : extra) put(id, find(id)->entry.pattern, {&p});

        const std::vector<std::uintmax_t> before = shard_bytes_;
        try {
            for (std::size_t s = 0; s < shards; ++s) {
                if (chunks[s].empty()) continue;
                const fs::path path = dir_ / "shards" / shard_name(s);
                // Bytes past the committed length belong to an aborted ingest.
                fs::resize_file(path, before[s]);
                std::ofstream out(path, std::ios::binary | std::ios::app);
                out.write(chunks[s].data(), static_cast<std::streamsize>(chunks[s].size()));
                out.flush();
                if (!out) throw StoreError("write failure on " + path.string());
                shard_bytes_[s] += chunks[s].size();
            }
            write_manifest();
        } catch (...) {
            shard_bytes_ = before;
            for (std::size_t s = 0; s < shards; ++s) {
                std::error_code ec;
                fs::resize_file(dir_ / "shards" / shard_name(s), before[s], ec);
            }
            throw;
        }
    }

    void write_manifest() const {
        nlohmann::json stats = nlohmann::json::object();
        for (std::size_t s = 0; s < kCorpusSourceCount; ++s) {
            const SourceStats& st = stats_.per_source[s];
            stats[std::string(corpus_source_name(static_cast<CorpusSource>(s)))] = {
                {"targets", st.targets}, {"found", st.found}, {"unique", st.unique}};
        }
        const nlohmann::json m = {{"version", kFormatVersion},
                                  {"shard_count", shard_bytes_.size()},
                                  {"shard_bytes", shard_bytes_},
                                  {"stats", stats}};
        const auto tmp = dir_ / "manifest.json.tmp";
        {
            std::ofstream out(tmp);
            out << m.dump(2) << '\n';
            if (!out) throw StoreError("cannot write manifest");
        }
        std::filesystem::rename(tmp, dir_ / "manifest.json");
    }

    std::filesystem::path dir_;
    std::vector<std::uintmax_t> shard_bytes_;
    std::vector<StoredEntry> entries_;
    CorpusStats stats_;
};

/// Read-only window over a store: a source filter plus excluded patterns.
/// Views never modify the store.
class CorpusView {
public:
    explicit CorpusView(const CorpusStore& store) : store_(&store) {}

    CorpusView exclude(std::string_view pattern) const {
        CorpusView v = *this;
        v.excluded_.insert(pattern_id(pattern));
        return v;
    }

    CorpusView with_sources(SourceMask mask) const {
        CorpusView v = *this;
        v.sources_ = mask;
        return v;
    }

    SourceMask sources() const { return sources_; }
    const CorpusStore& store() const { return *store_; }

    bool visible(const StoredEntry& e) const {
        return e.entry.parse_status == ParseStatus::Ok && !excluded_.count(e.entry.id) && e.entry.from_any(sources_);
    }

    /// Entries with parse_status ok in id order. With hints, entries whose
    /// facts rule out every positive are skipped.
    std::vector<const StoredEntry*> scan(const QueryHints* hints = nullptr) const {
        std::vector<const StoredEntry*> out;
        for (const StoredEntry& e : store_->entries()) {
            if (!visible(e)) continue;
            if (hints && !may_satisfy(e.facts, *hints)) continue;
            out.push_back(&e);
        }
        return out;
    }

private:
    const CorpusStore* store_;
    std::unordered_set<std::uint64_t> excluded_;
    SourceMask sources_ = kAllSources;
};

inline CorpusView CorpusStore::view() const { return CorpusView(*this); }

}  // namespace regex_forge

#endif  // REGEX_FORGE_CORPUS_HPP

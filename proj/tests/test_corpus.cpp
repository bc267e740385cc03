#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "fieldvar/lexicon.hpp"
#include "fieldvar/resolved.hpp"
#include "test_util.hpp"

using namespace fieldvar;
using namespace fieldvar::corpus;

namespace {

// Independent counting oracle: a regex tokenizer that shares no code with
// corpus::tokenize. ASCII fixtures only.
std::vector<std::string> oracle_tokenize(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    static const std::regex word("[a-z0-9]+(?:-[a-z0-9]+)*");
    std::vector<std::string> tokens;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), word);
         it != std::sregex_iterator(); ++it) {
        tokens.push_back(it->str());
    }
    return tokens;
}

std::map<std::string, testutil::FieldFixture> five_field_fixture() {
    return {
        {"arch", {{"cache lines and pipeline stalls dominate", "multicore scaling hits a wall"},
                  "multicore\narchitecture design\n"}},
        {"comm", {{"signal alignment in noisy channels", "wireless relays drop packets"},
                  "wireless\nsignal alignment\n"}},
        {"cv", {{"image segmentation with convolutional filters"}, "segmentation\nimaging\n"}},
        {"dbdm", {{"query plans over distributed storage", "frequent itemsets and joins"},
                  "query mining\nstorage\n"}},
        {"nlp", {{"word alignment for machine translation", "parsing with neural grammars"},
                 "alignment parsing\ntranslation\n"}},
    };
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("ingest: two-field layout with concatenated streams") {
    testutil::TempDir dir("ingest");
    testutil::write_corpus_tree(dir.path(), {
        {"a", {{"one two", "three"}, "title a\n"}},
        {"b", {{"four", "five six"}, "title b\n"}},
    });
    auto corpora = ingest_corpus(dir.path(), {});
    REQUIRE(corpora.size() == 2);
    CHECK(corpora[0].field == "a");
    CHECK(corpora[0].body_tokens == std::vector<std::string>{"one", "two", "three"});
    CHECK(corpora[1].field == "b");
    CHECK(corpora[1].body_tokens == std::vector<std::string>{"four", "five", "six"});
    CHECK(corpora[0].title_tokens == std::vector<std::string>{"title", "a"});
}

TEST_CASE("ingest: document order is lexicographic by filename") {
    testutil::TempDir dir("order");
    std::filesystem::create_directories(dir.path() / "a" / "papers");
    atomic_write(dir.path() / "a" / "papers" / "z.txt", "last");
    atomic_write(dir.path() / "a" / "papers" / "a.txt", "first");
    atomic_write(dir.path() / "a" / "titles.txt", "t\n");
    std::filesystem::create_directories(dir.path() / "b" / "papers");
    atomic_write(dir.path() / "b" / "papers" / "doc.txt", "x");
    atomic_write(dir.path() / "b" / "titles.txt", "t\n");
    auto corpora = ingest_corpus(dir.path(), {});
    CHECK(corpora[0].body_tokens == std::vector<std::string>{"first", "last"});
}

TEST_CASE("ingest: declared errors") {
    testutil::TempDir dir("errors");
    testutil::write_corpus_tree(dir.path(), {
        {"a", {{"text here"}, "title\n"}},
        {"b", {{"more text"}, "title\n"}},
    });
    std::filesystem::remove(dir.path() / "b" / "titles.txt");
    CHECK_THROWS_WITH_AS(ingest_corpus(dir.path(), {}), "missing titles for field b",
                         std::runtime_error);

    atomic_write(dir.path() / "b" / "titles.txt", "title\n");
    std::filesystem::remove(dir.path() / "b" / "papers" / "doc_000.txt");
    CHECK_THROWS_WITH_AS(ingest_corpus(dir.path(), {}), "no documents for field b",
                         std::runtime_error);

    testutil::TempDir one("onefield");
    testutil::write_corpus_tree(one.path(), {{"a", {{"text"}, "t\n"}}});
    CHECK_THROWS_AS(ingest_corpus(one.path(), {}), std::runtime_error);
}

TEST_CASE("ingest: five-field fixture matches the independent counting oracle") {
    testutil::TempDir dir("fivefield");
    auto fixture = five_field_fixture();
    testutil::write_corpus_tree(dir.path(), fixture);
    auto corpora = ingest_corpus(dir.path(), {});
    REQUIRE(corpora.size() == 5);

    std::size_t total = 0;
    for (const auto& fc : corpora) {
        std::size_t expected = 0;
        for (const std::string& doc : fixture.at(fc.field).documents) {
            expected += oracle_tokenize(doc).size();
        }
        CHECK(fc.body_tokens.size() == expected);
        CHECK(fc.title_tokens == oracle_tokenize(fixture.at(fc.field).titles));
        total += fc.body_tokens.size();
    }
    // partition: per-field sizes add up to the whole corpus, no sharing
    std::size_t oracle_total = 0;
    for (const auto& [name, fx] : fixture) {
        (void)name;
        for (const std::string& doc : fx.documents) {
            oracle_total += oracle_tokenize(doc).size();
        }
    }
    CHECK(total == oracle_total);
}

TEST_CASE("build_term_vocab: frequency forcing and stopword removal") {
    FieldCorpus a{"a", {"body"}, {"x", "x", "y"}};
    FieldCorpus b{"b", {"body"}, {"z", "w", "z"}};
    auto lists = build_term_vocab({a, b}, {}, 1);
    CHECK(lists["a"] == std::vector<std::string>{"x"});
    CHECK(lists["b"] == std::vector<std::string>{"z"});

    auto with_stop = build_term_vocab({a, b}, {"x"}, 1);
    CHECK(with_stop["a"] == std::vector<std::string>{"y"});
}

TEST_CASE("build_term_vocab: ties break lexicographically, short fields warn") {
    FieldCorpus a{"a", {"body"}, {"beta", "alpha", "gamma", "alpha", "beta", "gamma"}};
    FieldCorpus b{"b", {"body"}, {"only"}};
    auto lists = build_term_vocab({a, b}, {}, 2);
    CHECK(lists["a"] == std::vector<std::string>{"alpha", "beta"});
    CHECK(lists["b"] == std::vector<std::string>{"only"});  // fewer than n: takes all
}

TEST_CASE("build_term_vocab: matches a brute-force counter oracle") {
    std::vector<std::string> titles;
    for (int i = 0; i < 40; ++i) {
        titles.push_back("t" + std::to_string(i % 7));
        if (i % 3 == 0) {
            titles.push_back("u" + std::to_string(i % 5));
        }
    }
    FieldCorpus a{"a", {"body"}, titles};
    FieldCorpus b{"b", {"body"}, {"pad", "pad"}};
    auto lists = build_term_vocab({a, b}, {}, 5);

    std::map<std::string, int> counts;
    for (const auto& t : titles) {
        ++counts[t];
    }
    std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < 5; ++i) {
        expected.push_back(ranked[i].first);
    }
    CHECK(lists["a"] == expected);
}

TEST_CASE("build_global_vocab: disjointness and thresholds") {
    FieldCorpus a{"a", {"a", "b", "a"}, {"t"}};
    FieldCorpus b{"b", {"c"}, {"t"}};
    CHECK(build_global_vocab({a, b}, {"b"}, 1) == std::set<std::string>{"a", "c"});
    // threshold boundary: count = min_count - 1 is excluded
    CHECK(build_global_vocab({a, b}, {}, 2) == std::set<std::string>{"a"});
    CHECK_THROWS_AS(build_global_vocab({a, b}, {"a", "b", "c"}, 3), std::runtime_error);
}

TEST_CASE("lexicon: slot layout, routing, and declared errors") {
    auto lex = Lexicon::build({"nlp", "comm"},
                              {{"nlp", {"alignment", "grid"}}, {"comm", {"alignment"}}},
                              {"the", "a"});
    // slots: |V_G| + m * |V_F| with V_F the union
    CHECK(lex.slot_count() == 2 + 2 * 2);
    CHECK(lex.field_terms() == std::set<std::string>{"alignment", "grid"});

    auto nlp_slot = lex.resolve("alignment", "nlp");
    auto comm_slot = lex.resolve("alignment", "comm");
    REQUIRE(nlp_slot.has_value());
    REQUIRE(comm_slot.has_value());
    CHECK(*nlp_slot != *comm_slot);  // localization forcing

    CHECK(lex.resolve("the", "nlp") == lex.resolve("the", "comm"));  // global forcing
    CHECK_FALSE(lex.resolve("unknown", "nlp").has_value());
    CHECK_THROWS_AS(lex.resolve("the", "physics"), std::runtime_error);

    CHECK_THROWS_AS(Lexicon::build({"a", "b"}, {{"a", {"dup"}}}, {"dup"}), std::runtime_error);
}

TEST_CASE("lexicon: every slot is reachable through resolve") {
    auto lex = Lexicon::build({"a", "b", "c"}, {{"a", {"t1", "t2"}}, {"b", {"t3"}}},
                              {"g1", "g2", "g3"});
    CHECK(lex.slot_count() == 3 + 3 * 3);
    for (std::uint32_t s = 0; s < lex.slot_count(); ++s) {
        const auto& info = lex.slot(s);
        auto resolved = info.scope == kGlobalScope ? lex.resolve(info.surface, "a")
                                                   : lex.resolve(info.surface, info.scope);
        REQUIRE(resolved.has_value());
        CHECK(*resolved == s);
    }
}

TEST_CASE("lexicon: routing matches an independent table oracle") {
    auto fixture = five_field_fixture();
    testutil::TempDir dir("routing");
    testutil::write_corpus_tree(dir.path(), fixture);
    auto corpora = ingest_corpus(dir.path(), {});
    auto term_lists = build_term_vocab(corpora, {}, 2);
    std::set<std::string> vf;
    for (const auto& [f, list] : term_lists) {
        (void)f;
        vf.insert(list.begin(), list.end());
    }
    auto vg = build_global_vocab(corpora, vf, 1);
    std::vector<FieldId> fields;
    for (const auto& fc : corpora) {
        fields.push_back(fc.field);
    }
    auto lex = Lexicon::build(fields, term_lists, vg);

    // oracle: rebuild the slot table from scratch with plain sorted maps
    std::vector<std::string> sorted_fields = fields;
    std::sort(sorted_fields.begin(), sorted_fields.end());
    std::map<std::string, std::uint32_t> oracle;
    std::uint32_t next = 0;
    for (const auto& g : std::set<std::string>(vg.begin(), vg.end())) {
        oracle[g + "\x01G"] = next++;
    }
    for (const auto& t : std::set<std::string>(vf.begin(), vf.end())) {
        for (const auto& f : sorted_fields) {
            oracle[t + "\x01" + f] = next++;
        }
    }
    for (const auto& fc : corpora) {
        for (const std::string& token : fc.body_tokens) {
            auto got = lex.resolve(token, fc.field);
            auto git = oracle.find(token + "\x01G");
            auto fit = oracle.find(token + "\x01" + fc.field);
            if (vf.contains(token)) {
                REQUIRE(got.has_value());
                CHECK(*got == fit->second);
            } else if (vg.contains(token)) {
                REQUIRE(got.has_value());
                CHECK(*got == git->second);
            } else {
                CHECK_FALSE(got.has_value());
            }
        }
    }
}

TEST_CASE("lexicon: TSV round-trip is byte-identical and validated") {
    auto lex = Lexicon::build({"x", "y"}, {{"x", {"term"}}}, {"word"});
    testutil::TempDir dir("lexicon");
    auto path = dir.path() / "lexicon.tsv";
    lex.save_tsv(path);
    std::string first = read_text_file(path);

    auto reloaded = Lexicon::load_tsv(path);
    CHECK(reloaded.slot_count() == lex.slot_count());
    reloaded.save_tsv(path);
    CHECK(read_text_file(path) == first);

    atomic_write(path,
                 "slot_id\tsurface\tscope\n0\tzz\tGLOBAL\n1\taa\tGLOBAL\n"
                 "2\tterm\tx\n3\tterm\ty\n");
    CHECK_THROWS_AS(Lexicon::load_tsv(path), std::runtime_error);
}

TEST_CASE("vocabulary build is deterministic across runs") {
    auto fixture = five_field_fixture();
    testutil::TempDir dir("determinism");
    testutil::write_corpus_tree(dir.path(), fixture);
    auto build_once = [&] {
        auto corpora = ingest_corpus(dir.path(), {});
        auto term_lists = build_term_vocab(corpora, {}, 2);
        std::set<std::string> vf;
        for (const auto& [f, list] : term_lists) {
            (void)f;
            vf.insert(list.begin(), list.end());
        }
        auto vg = build_global_vocab(corpora, vf, 1);
        std::vector<FieldId> fields;
        for (const auto& fc : corpora) {
            fields.push_back(fc.field);
        }
        auto lex = Lexicon::build(fields, term_lists, vg);
        auto path = dir.path() / "lex.tsv";
        lex.save_tsv(path);
        return read_text_file(path);
    };
    CHECK(build_once() == build_once());
}

TEST_CASE("word_frequency: forced cases and the brute-force oracle") {
    FieldCorpus a{"a", {"solo", "solo"}, {"solo"}};
    FieldCorpus b{"b", {"other", "solo", "word"}, {"solo"}};
    auto lex = Lexicon::build({"a", "b"}, {{"a", {"solo"}}, {"b", {"solo"}}},
                              {"other", "word"});
    auto rc = resolve_corpora({a, b}, lex);

    // single-slot corpus: frequency 1.0; absent slot: 0.0
    CHECK(rc.frequency(lex.term_slot("solo", "a"), "a") == 1.0);
    CHECK(rc.frequency(lex.global_slot("other"), "a") == 0.0);

    // brute force per slot, and the per-field distribution sums to 1
    for (const auto& fc : {a, b}) {
        double sum = 0.0;
        std::map<std::uint32_t, std::int64_t> oracle;
        std::int64_t total = 0;
        for (const auto& token : fc.body_tokens) {
            if (auto slot = lex.resolve(token, fc.field)) {
                ++oracle[*slot];
                ++total;
            }
        }
        for (std::uint32_t s = 0; s < lex.slot_count(); ++s) {
            double expect = oracle.contains(s)
                                ? static_cast<double>(oracle[s]) / static_cast<double>(total)
                                : 0.0;
            CHECK(rc.frequency(s, fc.field) == doctest::Approx(expect).epsilon(1e-15));
            sum += rc.frequency(s, fc.field);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("word_frequency: zero resolved tokens is an error") {
    FieldCorpus a{"a", {"zzz"}, {"t"}};
    FieldCorpus b{"b", {"known", "known", "known", "known", "known"}, {"t"}};
    auto lex = Lexicon::build({"a", "b"}, {{"a", {"t"}}}, {"known"});
    auto rc = resolve_corpora({a, b}, lex);
    CHECK_THROWS_AS(rc.frequency(0, "a"), std::runtime_error);
}

}  // TEST_SUITE

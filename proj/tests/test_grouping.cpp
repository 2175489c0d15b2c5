#include "hb/grouping.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace hb;

namespace {

Lexicon test_lexicon() { return load_lexicon(std::filesystem::path(HB_TEST_DATA) / "lexicon"); }

AnnotatedSpan span(const std::string& text, std::uint64_t count = 1, bool input = true) {
    return {text, std::nullopt, count, input};
}

std::vector<EquivalenceSet> group_all(const std::vector<AnnotatedSpan>& spans, const Lexicon& lex) {
    auto index = build_class_index(lemma_vocabulary(spans, lex), lex);
    return group(spans, lex, index);
}

}  // namespace

TEST_CASE("herniated disc variants form one set") {
    auto lex = test_lexicon();
    auto sets = group_all({span("herniated disk"), span("herniated disc"), span("disc herniation"),
                           span("herniation of the disc")},
                          lex);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].members.size() == 4);
    CHECK(sets[0].total_count == 4);
    CHECK(sets[0].is_input);
}

TEST_CASE("singleton set") {
    auto lex = test_lexicon();
    auto sets = group_all({span("endometriosis", 3)}, lex);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].members.size() == 1);
    CHECK(sets[0].total_count == 3);
}

TEST_CASE("empty-bag spans stay apart and come last") {
    auto lex = test_lexicon();
    auto sets = group_all({span("of the"), span("2"), span("pain"), span("Of  The", 2)}, lex);
    REQUIRE(sets.size() == 3);
    CHECK_FALSE(sets[0].bag.empty());
    CHECK(sets[1].bag.empty());
    CHECK(sets[2].bag.empty());
    // "of the" and "Of  The" share a normal form and fold into one member.
    auto it = std::find_if(sets.begin(), sets.end(), [](const auto& s) { return s.total_count == 3; });
    REQUIRE(it != sets.end());
    CHECK(it->members.size() == 1);
}

TEST_CASE("member order and flags") {
    auto lex = test_lexicon();
    auto sets = group_all({span("disc herniation", 2), span("herniated disc", 0, false), span("herniated disk", 5)}, lex);
    REQUIRE(sets.size() == 1);
    const auto& m = sets[0].members;
    CHECK(m[0].text == "herniated disk");
    CHECK(m[1].text == "disc herniation");
    CHECK(m[2].text == "herniated disc");
    CHECK(sets[0].is_input);
    CHECK(sets[0].total_count == 7);

    auto derived_only = group_all({span("pain", 0, false)}, lex);
    CHECK_FALSE(derived_only[0].is_input);
}

TEST_CASE("random strings: partition matches the pairwise oracle and ignores input order") {
    auto lex = test_lexicon();
    const std::vector<std::string> words{"pain", "pains", "disc", "disk", "the", "of", "leg", "legs", "severe", "2"};
    std::mt19937 rng(3);
    for (int round = 0; round < 200; ++round) {
        std::vector<AnnotatedSpan> spans;
        std::set<std::string> seen;
        while (spans.size() < 6) {
            std::string text;
            int n = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < n; ++i) text += (i ? " " : "") + words[rng() % words.size()];
            if (!seen.insert(normalize_text(text)).second) continue;
            spans.push_back(span(text, 1 + rng() % 4));
        }
        auto index = build_class_index(lemma_vocabulary(spans, lex), lex);
        auto sets = group(spans, lex, index);

        std::map<std::string, std::size_t> set_of;
        std::size_t covered = 0;
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (const auto& m : sets[i].members) {
                CHECK(set_of.emplace(m.text, i).second);
                ++covered;
                CHECK(to_bag(m.text, lex, index) == sets[i].bag);
            }
        CHECK(covered == spans.size());
        // 15 pairs: same set iff equal non-empty bags or equal normal form.
        for (std::size_t a = 0; a < spans.size(); ++a)
            for (std::size_t b = a + 1; b < spans.size(); ++b) {
                auto ba = to_bag(spans[a].text, lex, index), bb = to_bag(spans[b].text, lex, index);
                bool expect = ba.empty() ? (bb.empty() && normalize_text(spans[a].text) == normalize_text(spans[b].text))
                                         : ba == bb;
                CHECK((set_of[spans[a].text] == set_of[spans[b].text]) == expect);
            }
        auto shuffled = spans;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto again = group(shuffled, lex, index);
        REQUIRE(again.size() == sets.size());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            CHECK(again[i].bag == sets[i].bag);
            CHECK(again[i].members == sets[i].members);
            CHECK(again[i].total_count == sets[i].total_count);
        }
    }
}

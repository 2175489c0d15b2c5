#include "hb/error.hpp"
#include "hb/expansion.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace hb;

namespace {

AnnotatedSpan parsed(const std::string& text, std::vector<int> heads) {
    AnnotatedSpan s;
    s.text = text;
    auto words = tokenize(text);
    REQUIRE(words.size() == heads.size());
    std::vector<TokenAnnotation> toks;
    for (std::size_t i = 0; i < words.size(); ++i) toks.push_back({words[i], std::nullopt, std::nullopt, heads[i]});
    s.tokens = toks;
    return s;
}

std::set<std::string> texts(const std::vector<AnnotatedSpan>& spans) {
    std::set<std::string> out;
    for (const auto& s : spans) out.insert(s.text);
    return out;
}

Lexicon stop_lexicon() {
    Lexicon lex;
    for (const char* w : {"the", "of", "in", "a"}) lex.stopwords.insert(w);
    return lex;
}

// "severe pain in the lower right leg", rooted at "pain".
AnnotatedSpan leg_pain() { return parsed("severe pain in the lower right leg", {1, -1, 6, 6, 6, 6, 1}); }

}  // namespace

TEST_CASE("find_head uses the tree root") {
    auto lex = stop_lexicon();
    CHECK(find_head(leg_pain(), lex) == 1);
    CHECK(find_head(parsed("endometriosis", {-1}), lex) == 0);
}

TEST_CASE("find_head fallback picks the last non-stopword token") {
    auto lex = stop_lexicon();
    AnnotatedSpan s{"lumbar disk herniation", std::nullopt, 1, true};
    CHECK(find_head(s, lex) == 2);
    AnnotatedSpan t{"pain of the", std::nullopt, 1, true};
    CHECK(find_head(t, lex) == 0);
    AnnotatedSpan all_stop{"of the", std::nullopt, 1, true};
    CHECK(find_head(all_stop, lex) == 1);
    CHECK(head_form(s, lex) == "herniation");
}

TEST_CASE("annotation errors") {
    auto lex = stop_lexicon();
    CHECK_THROWS_AS(find_head(parsed("a b", {-1, -1}), lex), AnnotationError);
    CHECK_THROWS_AS(find_head(parsed("a b c", {1, 2, 1}), lex), AnnotationError);
    CHECK_THROWS_AS(validate_annotations(parsed("a b", {5, -1})), AnnotationError);
    auto mismatch = parsed("a b", {1, -1});
    mismatch.text = "a c";
    CHECK_THROWS_AS(validate_annotations(mismatch), AnnotationError);
    CHECK_NOTHROW(validate_annotations(leg_pain()));
}

TEST_CASE("expand the leg pain example") {
    auto lex = stop_lexicon();
    auto out = texts(expand(leg_pain(), lex));
    CHECK(out == std::set<std::string>{"pain", "severe pain", "pain in the lower right leg"});
    for (const auto& s : expand(leg_pain(), lex)) {
        CHECK_FALSE(s.is_input);
        CHECK(s.count == 0);
        REQUIRE(s.tokens);
        CHECK_NOTHROW(validate_annotations(s));
    }
}

TEST_CASE("single token yields nothing") {
    auto lex = stop_lexicon();
    CHECK(expand(parsed("fracture", {-1}), lex).empty());
}

TEST_CASE("left and right adjacent modifiers") {
    auto lex = stop_lexicon();
    auto out = texts(expand(parsed("l h r", {1, -1, 1}), lex));
    CHECK(out == std::set<std::string>{"h", "l h", "h r"});
}

TEST_CASE("non-contiguous subsets are discarded") {
    auto lex = stop_lexicon();
    // "bilateral rib fracture": both modifiers attach to "fracture".
    auto out = texts(expand(parsed("bilateral rib fracture", {2, 2, -1}), lex));
    CHECK(out == std::set<std::string>{"fracture", "rib fracture"});
}

TEST_CASE("unannotated spans expand to their head word") {
    auto lex = stop_lexicon();
    AnnotatedSpan s{"lumbar disk herniation", std::nullopt, 4, true};
    auto out = expand(s, lex);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "herniation");
    CHECK_FALSE(out[0].is_input);
    AnnotatedSpan single{"herniation", std::nullopt, 4, true};
    CHECK(expand(single, lex).empty());
}

TEST_CASE("modifier cap keeps the enumeration linear") {
    auto lex = stop_lexicon();
    // Head in the middle with 12 single-token modifiers on each side.
    std::string text;
    std::vector<int> heads;
    for (int i = 0; i < 25; ++i) {
        if (i) text += ' ';
        text += "w" + std::to_string(i);
        heads.push_back(i == 12 ? -1 : 12);
    }
    auto out = expand(parsed(text, heads), lex);
    // head alone, 12 left prefixes, 12 right prefixes, 24 two-sided prefixes by distance, minus the original.
    CHECK(out.size() <= 3 * 25);
    auto got = texts(out);
    CHECK(got.contains("w12"));
    CHECK(got.contains("w11 w12"));
    CHECK(got.contains("w12 w13"));
    CHECK(got.contains("w11 w12 w13"));
    CHECK_FALSE(got.contains(text));
}

TEST_CASE("expand_all dedups and lets originals win") {
    auto lex = stop_lexicon();
    std::vector<AnnotatedSpan> inputs{parsed("severe pain", {1, -1}), parsed("chest pain", {1, -1})};
    inputs[0].count = 3;
    inputs[1].count = 2;
    auto out = expand_all(inputs, lex);
    CHECK(texts(out) == std::set<std::string>{"chest pain", "pain", "severe pain"});
    for (const auto& s : out) {
        if (s.text == "pain") {
            CHECK_FALSE(s.is_input);
            CHECK(s.count == 0);
        } else {
            CHECK(s.is_input);
        }
    }

    std::vector<AnnotatedSpan> with_original{parsed("severe pain", {1, -1}), AnnotatedSpan{"Pain", std::nullopt, 5, true}};
    auto out2 = expand_all(with_original, lex);
    REQUIRE(out2.size() == 2);
    auto pain = std::find_if(out2.begin(), out2.end(), [](const auto& s) { return normalize_text(s.text) == "pain"; });
    REQUIRE(pain != out2.end());
    CHECK(pain->is_input);
    CHECK(pain->count == 5);
}

TEST_CASE("expand_all folds duplicate originals and rejects empty input") {
    auto lex = stop_lexicon();
    std::vector<AnnotatedSpan> inputs{{"chest pain", std::nullopt, 2, true}, {"Chest  pain", std::nullopt, 5, true}};
    auto out = expand_all(inputs, lex);
    auto it = std::find_if(out.begin(), out.end(), [](const auto& s) { return s.is_input; });
    REQUIRE(it != out.end());
    CHECK(it->count == 7);
    CHECK_THROWS_AS(expand_all({}, lex), ArgumentError);
}

TEST_CASE("inputs without modifiers come back unchanged") {
    auto lex = stop_lexicon();
    std::vector<AnnotatedSpan> inputs{parsed("anxiety", {-1}), parsed("pneumonia", {-1})};
    auto out = expand_all(inputs, lex);
    CHECK(texts(out) == std::set<std::string>{"anxiety", "pneumonia"});
}

TEST_CASE("random trees: derived spans are contiguous, contain the head and respect the bound") {
    auto lex = stop_lexicon();
    std::mt19937 rng(11);
    for (int round = 0; round < 300; ++round) {
        const int n = 1 + static_cast<int>(rng() % 9);
        std::vector<int> heads(n);
        // Random tree: token 0..n-1, root chosen at random, others attach to an earlier-visited token.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        heads[order[0]] = -1;
        for (int i = 1; i < n; ++i) heads[order[i]] = order[rng() % i];
        std::string text;
        for (int i = 0; i < n; ++i) text += (i ? " t" : "t") + std::to_string(i);
        auto span = parsed(text, heads);
        const auto head_word = "t" + std::to_string(order[0]);
        auto out = expand(span, lex);
        std::size_t direct = std::count(heads.begin(), heads.end(), order[0]);
        CHECK(out.size() < (std::size_t{1} << direct) + 1);
        for (const auto& d : out) {
            CHECK(text.find(d.text) != std::string::npos);
            auto toks = tokenize(d.text);
            CHECK(std::find(toks.begin(), toks.end(), head_word) != toks.end());
            CHECK(d.text != text);
        }
        auto all = expand_all({span}, lex);
        std::set<std::string> norm;
        for (const auto& s : all) CHECK(norm.insert(normalize_text(s.text)).second);
        CHECK(std::count_if(all.begin(), all.end(), [](const auto& s) { return s.is_input; }) == 1);
    }
}

#pragma once
// Expansion of maximal strings into their modification spans.

#include "hb/textnorm.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hb {

struct TokenAnnotation {
    std::string form;
    std::optional<std::string> lemma;
    std::optional<std::string> pos;
    int head = -1;  // index of the syntactic parent inside the span, -1 for the root

    bool operator==(const TokenAnnotation&) const = default;
};

struct AnnotatedSpan {
    std::string text;
    std::optional<std::vector<TokenAnnotation>> tokens;
    std::uint64_t count = 1;
    bool is_input = true;

    bool operator==(const AnnotatedSpan&) const = default;
};

// Throws AnnotationError unless the head links form one tree and the token
// forms reproduce the whitespace-normalized text.
void validate_annotations(const AnnotatedSpan& span);

// Index of the head token. Annotated spans: the tree root. Otherwise the
// last token of tokenize(text) that is not a stopword (the last token when
// every token is a stopword).
std::size_t find_head(const AnnotatedSpan& span, const Lexicon& lexicon);

// Surface form of the head token.
std::string head_form(const AnnotatedSpan& span, const Lexicon& lexicon);

// Modification spans of `span`: the head plus any subset of its direct
// modifier subtrees, kept when the tokens are contiguous. The original text
// is never part of the result. Spans without annotations yield only the
// head word.
std::vector<AnnotatedSpan> expand(const AnnotatedSpan& span, const Lexicon& lexicon);

// Above this many direct modifiers only distance-ordered prefixes are tried.
inline constexpr std::size_t kMaxEnumeratedModifiers = 10;

// Originals plus every derived span, deduplicated by normalize_text and
// sorted by it. An original always wins over a derived duplicate.
std::vector<AnnotatedSpan> expand_all(const std::vector<AnnotatedSpan>& inputs, const Lexicon& lexicon);

}  // namespace hb

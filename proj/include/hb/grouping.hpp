#pragma once

#include "hb/expansion.hpp"
#include "hb/textnorm.hpp"

#include <cstdint>
#include <vector>

namespace hb {

struct EquivalenceSet {
    // is_input first, then descending count, then text.
    std::vector<AnnotatedSpan> members;
    LemmaBag bag;
    bool is_input = false;
    std::uint64_t total_count = 0;
};

// Partitions spans by lemma bag. Spans whose bag is empty are grouped by
// normalized text and never join a non-empty bag. Sets come back ordered by
// bag, empty-bag sets last (ordered by text).
std::vector<EquivalenceSet> group(const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon,
                                  const LemmaClassIndex& index);

// Vocabulary for build_class_index: the content lemmas of every span.
std::set<std::string> lemma_vocabulary(const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon);

}  // namespace hb

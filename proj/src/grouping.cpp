#include "hb/grouping.hpp"

#include <algorithm>
#include <map>

namespace hb {

namespace {

bool member_before(const AnnotatedSpan& a, const AnnotatedSpan& b) {
    if (a.is_input != b.is_input) return a.is_input;
    if (a.count != b.count) return a.count > b.count;
    return a.text < b.text;
}

EquivalenceSet make_set(std::vector<AnnotatedSpan> members, LemmaBag bag) {
    EquivalenceSet set;
    std::map<std::string, AnnotatedSpan> unique;
    for (auto& m : members) {
        auto key = normalize_text(m.text);
        auto [it, inserted] = unique.emplace(key, m);
        if (!inserted) {
            it->second.count += m.count;
            it->second.is_input = it->second.is_input || m.is_input;
        }
    }
    for (auto& [key, m] : unique) {
        set.is_input = set.is_input || m.is_input;
        set.total_count += m.count;
        set.members.push_back(std::move(m));
    }
    std::sort(set.members.begin(), set.members.end(), member_before);
    set.bag = std::move(bag);
    return set;
}

}  // namespace

std::vector<EquivalenceSet> group(const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon,
                                  const LemmaClassIndex& index) {
    std::map<LemmaBag, std::vector<AnnotatedSpan>> by_bag;
    std::map<std::string, std::vector<AnnotatedSpan>> empty_by_text;
    for (const auto& span : spans) {
        auto bag = to_bag(span.text, lexicon, index);
        if (bag.empty()) empty_by_text[normalize_text(span.text)].push_back(span);
        else by_bag[std::move(bag)].push_back(span);
    }

    std::vector<EquivalenceSet> out;
    out.reserve(by_bag.size() + empty_by_text.size());
    for (auto& [bag, members] : by_bag) out.push_back(make_set(std::move(members), bag));
    for (auto& [text, members] : empty_by_text) out.push_back(make_set(std::move(members), LemmaBag{}));
    return out;
}

std::set<std::string> lemma_vocabulary(const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon) {
    std::set<std::string> vocabulary;
    for (const auto& span : spans)
        for (auto& lemma : content_lemmas(span.text, lexicon)) vocabulary.insert(std::move(lemma));
    return vocabulary;
}

}  // namespace hb

#include "hb/expansion.hpp"

#include "hb/error.hpp"

#include <algorithm>
#include <map>

namespace hb {

namespace {

std::vector<std::vector<std::size_t>> children_of(const std::vector<TokenAnnotation>& tokens) {
    std::vector<std::vector<std::size_t>> children(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i].head >= 0) children[static_cast<std::size_t>(tokens[i].head)].push_back(i);
    return children;
}

void collect_subtree(const std::vector<std::vector<std::size_t>>& children, std::size_t node,
                     std::vector<std::size_t>& out) {
    out.push_back(node);
    for (auto c : children[node]) collect_subtree(children, c, out);
}

// Each candidate is a set of modifier positions (indices into the modifier
// list) to attach to the head.
std::vector<std::vector<std::size_t>> modifier_subsets(const std::vector<std::size_t>& distance,
                                                       const std::vector<bool>& is_left) {
    const std::size_t n = distance.size();
    std::vector<std::vector<std::size_t>> subsets;
    if (n <= kMaxEnumeratedModifiers) {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::size_t> s;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) s.push_back(i);
            subsets.push_back(std::move(s));
        }
        return subsets;
    }
    // Nearest-first prefixes: left side alone, right side alone, both sides.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return distance[a] < distance[b]; });
    for (int side = 0; side < 3; ++side) {
        std::vector<std::size_t> s;
        subsets.push_back(s);
        for (auto m : order) {
            if (side == 0 && !is_left[m]) continue;
            if (side == 1 && is_left[m]) continue;
            s.push_back(m);
            subsets.push_back(s);
        }
    }
    return subsets;
}

}  // namespace

void validate_annotations(const AnnotatedSpan& span) {
    if (!span.tokens) return;
    const auto& tokens = *span.tokens;
    if (tokens.empty()) throw AnnotationError("empty token list for \"" + span.text + "\"");

    std::string joined;
    for (const auto& t : tokens) {
        if (t.form.empty()) throw AnnotationError("empty token form in \"" + span.text + "\"");
        if (!joined.empty()) joined.push_back(' ');
        joined += t.form;
    }
    if (normalize_text(joined) != normalize_text(span.text))
        throw AnnotationError("token forms do not match text \"" + span.text + "\"");

    std::size_t roots = 0;
    const auto n = static_cast<int>(tokens.size());
    for (const auto& t : tokens) {
        if (t.head == -1) ++roots;
        else if (t.head < -1 || t.head >= n) throw AnnotationError("head index out of range in \"" + span.text + "\"");
    }
    if (roots != 1)
        throw AnnotationError("expected exactly one root, found " + std::to_string(roots) + " in \"" + span.text + "\"");

    // With a single root, the links form a tree iff every token reaches it.
    for (int i = 0; i < n; ++i) {
        int cur = i;
        int steps = 0;
        while (tokens[static_cast<std::size_t>(cur)].head != -1) {
            cur = tokens[static_cast<std::size_t>(cur)].head;
            if (++steps > n) throw AnnotationError("cyclic head links in \"" + span.text + "\"");
        }
    }
}

std::size_t find_head(const AnnotatedSpan& span, const Lexicon& lexicon) {
    if (span.tokens) {
        validate_annotations(span);
        const auto& tokens = *span.tokens;
        for (std::size_t i = 0; i < tokens.size(); ++i)
            if (tokens[i].head == -1) return i;
    }
    auto words = tokenize(span.text);
    if (words.empty()) throw ArgumentError("cannot find the head of an empty span");
    for (std::size_t i = words.size(); i-- > 0;)
        if (!lexicon.is_stopword(words[i])) return i;
    return words.size() - 1;
}

std::string head_form(const AnnotatedSpan& span, const Lexicon& lexicon) {
    auto index = find_head(span, lexicon);
    if (span.tokens) return to_lower((*span.tokens)[index].form);
    return tokenize(span.text)[index];
}

std::vector<AnnotatedSpan> expand(const AnnotatedSpan& span, const Lexicon& lexicon) {
    const auto original = normalize_text(span.text);
    std::vector<AnnotatedSpan> out;
    auto emit = [&](AnnotatedSpan derived) {
        if (normalize_text(derived.text) == original) return;
        derived.count = 0;
        derived.is_input = false;
        out.push_back(std::move(derived));
    };

    if (!span.tokens) {
        AnnotatedSpan head;
        head.text = head_form(span, lexicon);
        emit(std::move(head));
        return out;
    }

    const auto& tokens = *span.tokens;
    const auto head = find_head(span, lexicon);
    const auto children = children_of(tokens);
    const auto& modifiers = children[head];

    std::vector<std::vector<std::size_t>> subtree(modifiers.size());
    std::vector<std::size_t> distance(modifiers.size());
    std::vector<bool> is_left(modifiers.size());
    for (std::size_t m = 0; m < modifiers.size(); ++m) {
        collect_subtree(children, modifiers[m], subtree[m]);
        std::size_t best = tokens.size();
        for (auto t : subtree[m]) best = std::min(best, t > head ? t - head : head - t);
        distance[m] = best;
        is_left[m] = modifiers[m] < head;
    }

    std::set<std::string> seen;
    for (const auto& subset : modifier_subsets(distance, is_left)) {
        std::vector<std::size_t> picked{head};
        for (auto m : subset) picked.insert(picked.end(), subtree[m].begin(), subtree[m].end());
        std::sort(picked.begin(), picked.end());
        if (picked.back() - picked.front() + 1 != picked.size()) continue;

        std::vector<int> remap(tokens.size(), -1);
        for (std::size_t i = 0; i < picked.size(); ++i) remap[picked[i]] = static_cast<int>(i);
        AnnotatedSpan derived;
        std::vector<TokenAnnotation> sub;
        for (auto idx : picked) {
            TokenAnnotation t = tokens[idx];
            t.head = idx == head ? -1 : remap[static_cast<std::size_t>(t.head)];
            if (!derived.text.empty()) derived.text.push_back(' ');
            derived.text += t.form;
            sub.push_back(std::move(t));
        }
        if (!seen.insert(normalize_text(derived.text)).second) continue;
        derived.tokens = std::move(sub);
        emit(std::move(derived));
    }
    return out;
}

std::vector<AnnotatedSpan> expand_all(const std::vector<AnnotatedSpan>& inputs, const Lexicon& lexicon) {
    if (inputs.empty()) throw ArgumentError("expand_all needs at least one input span");

    std::map<std::string, AnnotatedSpan> by_text;
    for (const auto& span : inputs) {
        auto key = normalize_text(span.text);
        auto [it, inserted] = by_text.emplace(key, span);
        if (!inserted) it->second.count += span.count;
        it->second.is_input = true;
    }
    std::map<std::string, AnnotatedSpan> derived;
    for (const auto& span : inputs) {
        for (auto& d : expand(span, lexicon)) {
            auto key = normalize_text(d.text);
            if (by_text.contains(key)) continue;
            auto it = derived.find(key);
            // Ties between sources resolve to the smallest raw text.
            if (it == derived.end()) derived.emplace(std::move(key), std::move(d));
            else if (d.text < it->second.text) it->second = std::move(d);
        }
    }
    by_text.merge(derived);

    std::vector<AnnotatedSpan> out;
    out.reserve(by_text.size());
    for (auto& [key, span] : by_text) out.push_back(std::move(span));
    return out;
}

}  // namespace hb

#pragma once
// Lexical normalization: lexicon resources, lemmatization, relaxed lemma
// classes and lemma bags.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hb {

struct Lexicon {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> modals;
    std::unordered_set<std::string> quantities;
    std::unordered_map<std::string, std::string> lemma_table;
    // Sorted, deduplicated and symmetric: (a,b) present implies (b,a).
    std::vector<std::pair<std::string, std::string>> synonym_pairs;

    bool is_stopword(std::string_view word) const;
    bool is_modal(std::string_view word) const;
    // Numerals (integer or decimal) count as quantities even if not listed.
    bool is_quantity(std::string_view word) const;
    bool is_filtered(std::string_view word) const;
};

// Reads stopwords.txt, modals.txt, quantities.txt, lemmas.tsv and
// synonyms.tsv from `directory`. Every file is optional.
Lexicon load_lexicon(const std::filesystem::path& directory);

// Lowercase + collapse internal whitespace + trim. The shared normal form
// for deduplication and exact ontology matching.
std::string normalize_text(std::string_view text);

std::string to_lower(std::string_view text);

// Splits on whitespace and strips leading/trailing punctuation from each
// token. Internal hyphens survive ("x-ray"). Tokens are lowercased.
std::vector<std::string> tokenize(std::string_view text);

std::string lemmatize(std::string_view word, const Lexicon& lexicon);

// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

// Partition of a lemma vocabulary into classes of interchangeable lemmas.
// A class is identified by its lexicographically smallest member, so ids are
// stable across runs and meaningful when serialized.
class LemmaClassIndex {
public:
    LemmaClassIndex() = default;
    explicit LemmaClassIndex(std::map<std::string, std::string> class_of);

    // Lemmas outside the indexed vocabulary form their own class.
    const std::string& class_of(const std::string& lemma) const;
    std::vector<std::string> members(const std::string& class_id) const;

    const std::map<std::string, std::string>& mapping() const { return class_of_; }
    const std::map<std::string, std::set<std::string>>& classes() const { return classes_; }

private:
    std::map<std::string, std::string> class_of_;
    std::map<std::string, std::set<std::string>> classes_;
};

// Two lemmas are linked by a synonym pair or by edit distance <= 1 when both
// are at least 5 bytes long. Classes are the connected components.
LemmaClassIndex build_class_index(const std::set<std::string>& vocabulary, const Lexicon& lexicon);

// Set of lemma class ids, kept sorted and unique.
class LemmaBag {
public:
    LemmaBag() = default;
    explicit LemmaBag(std::vector<std::string> classes);

    const std::vector<std::string>& classes() const { return classes_; }
    bool empty() const { return classes_.empty(); }
    std::size_t size() const { return classes_.size(); }
    bool contains(const std::string& class_id) const;
    // Non-strict containment: every class of `other` is in *this.
    bool includes(const LemmaBag& other) const;
    bool strictly_includes(const LemmaBag& other) const {
        return classes_.size() > other.classes_.size() && includes(other);
    }
    LemmaBag united(const LemmaBag& other) const;

    auto operator<=>(const LemmaBag&) const = default;

private:
    std::vector<std::string> classes_;
};

// Lemmas of the content tokens of `text`, i.e. what to_bag maps to classes.
std::vector<std::string> content_lemmas(std::string_view text, const Lexicon& lexicon);

LemmaBag to_bag(std::string_view text, const Lexicon& lexicon, const LemmaClassIndex& index);

}  // namespace hb

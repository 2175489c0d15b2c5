#include "hb/textnorm.hpp"

#include "hb/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <regex>

namespace hb {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Replaces U+00A0 (no-break space) with a plain space so the byte-level
// splitter sees it.
std::string unify_spaces(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (static_cast<unsigned char>(text[i]) == 0xC2 && i + 1 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0xA0) {
            out.push_back(' ');
            ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        if (is_space(static_cast<unsigned char>(ch))) {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Yields the non-comment, non-blank lines of a resource file with their
// 1-based line numbers. A missing file yields nothing.
template <typename Fn>
void for_each_entry(const std::filesystem::path& file, Fn&& fn) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return;
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot read resource file " + file.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        fn(line, number);
    }
    if (in.bad()) throw ResourceError("error while reading " + file.string());
}

std::pair<std::string, std::string> split_pair(const std::string& line, std::size_t number,
                                               const std::filesystem::path& file) {
    std::vector<std::string> fields;
    if (line.find('\t') != std::string::npos) {
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            fields.push_back(normalize_text(line.substr(start, tab - start)));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
    } else {
        fields = split_ws(to_lower(line));
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
        throw ParseError("expected two fields in " + file.filename().string(), number);
    return {fields[0], fields[1]};
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    for (const auto& word : split_ws(unify_spaces(text))) {
        if (!out.empty()) out.push_back(' ');
        out += to_lower(word);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& raw : split_ws(unify_spaces(text))) {
        std::size_t begin = 0;
        std::size_t end = raw.size();
        while (begin < end && std::ispunct(static_cast<unsigned char>(raw[begin]))) ++begin;
        while (end > begin && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) --end;
        if (begin < end) out.push_back(to_lower(std::string_view(raw).substr(begin, end - begin)));
    }
    return out;
}

bool Lexicon::is_stopword(std::string_view word) const {
    return stopwords.contains(to_lower(word));
}

bool Lexicon::is_modal(std::string_view word) const {
    return modals.contains(to_lower(word));
}

bool Lexicon::is_quantity(std::string_view word) const {
    static const std::regex numeral(R"(^[0-9]+([.,][0-9]+)?$)");
    auto lower = to_lower(word);
    return quantities.contains(lower) || std::regex_match(lower, numeral);
}

bool Lexicon::is_filtered(std::string_view word) const {
    return is_stopword(word) || is_modal(word) || is_quantity(word);
}

Lexicon load_lexicon(const std::filesystem::path& directory) {
    std::error_code ec;
    if (!directory.empty() && std::filesystem::exists(directory, ec) &&
        !std::filesystem::is_directory(directory, ec))
        throw ResourceError("lexicon path is not a directory: " + directory.string());

    Lexicon lex;
    auto load_words = [&](const char* name, std::unordered_set<std::string>& into) {
        for_each_entry(directory / name, [&](const std::string& line, std::size_t) {
            into.insert(normalize_text(line));
        });
    };
    load_words("stopwords.txt", lex.stopwords);
    load_words("modals.txt", lex.modals);
    load_words("quantities.txt", lex.quantities);

    for_each_entry(directory / "lemmas.tsv", [&](const std::string& line, std::size_t n) {
        auto [form, lemma] = split_pair(line, n, directory / "lemmas.tsv");
        lex.lemma_table[form] = lemma;
    });

    std::set<std::pair<std::string, std::string>> pairs;
    for_each_entry(directory / "synonyms.tsv", [&](const std::string& line, std::size_t n) {
        auto [a, b] = split_pair(line, n, directory / "synonyms.tsv");
        if (a == b) return;
        pairs.emplace(a, b);
        pairs.emplace(b, a);
    });
    lex.synonym_pairs.assign(pairs.begin(), pairs.end());
    return lex;
}

std::string lemmatize(std::string_view word, const Lexicon& lexicon) {
    auto lower = to_lower(word);
    if (auto it = lexicon.lemma_table.find(lower); it != lexicon.lemma_table.end()) return it->second;

    std::string_view w = lower;
    if (ends_with(w, "ies") && w.size() > 3) return std::string(w.substr(0, w.size() - 3)) + "y";
    if (ends_with(w, "s") && w.size() >= 4 && !ends_with(w, "ss") && !ends_with(w, "us") &&
        !ends_with(w, "is"))
        return std::string(w.substr(0, w.size() - 1));
    if (ends_with(w, "ing") && w.size() - 3 >= 4) return std::string(w.substr(0, w.size() - 3));
    if (ends_with(w, "ed") && w.size() - 2 >= 4) return std::string(w.substr(0, w.size() - 2));
    return lower;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

LemmaClassIndex::LemmaClassIndex(std::map<std::string, std::string> class_of)
    : class_of_(std::move(class_of)) {
    for (const auto& [lemma, cls] : class_of_) classes_[cls].insert(lemma);
}

const std::string& LemmaClassIndex::class_of(const std::string& lemma) const {
    auto it = class_of_.find(lemma);
    return it == class_of_.end() ? lemma : it->second;
}

std::vector<std::string> LemmaClassIndex::members(const std::string& class_id) const {
    auto it = classes_.find(class_id);
    if (it == classes_.end()) return {class_id};
    return {it->second.begin(), it->second.end()};
}

LemmaClassIndex build_class_index(const std::set<std::string>& vocabulary, const Lexicon& lexicon) {
    std::vector<std::string> words(vocabulary.begin(), vocabulary.end());
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < words.size(); ++i) position.emplace(words[i], i);

    DisjointSets sets(words.size());
    for (const auto& [a, b] : lexicon.synonym_pairs) {
        auto ia = position.find(a);
        auto ib = position.find(b);
        if (ia != position.end() && ib != position.end()) sets.unite(ia->second, ib->second);
    }

    // Candidate pairs at edit distance <= 1 share a single-deletion variant
    // (or one is a deletion variant of the other); confirm each exactly.
    constexpr std::size_t kMinLength = 5;
    std::unordered_map<std::string, std::vector<std::size_t>> by_variant;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& w = words[i];
        if (w.size() < kMinLength) continue;
        by_variant[w].push_back(i);
        for (std::size_t k = 0; k < w.size(); ++k) {
            std::string variant = w.substr(0, k) + w.substr(k + 1);
            auto& bucket = by_variant[variant];
            if (bucket.empty() || bucket.back() != i) bucket.push_back(i);
        }
    }
    for (const auto& [variant, bucket] : by_variant) {
        for (std::size_t x = 0; x < bucket.size(); ++x) {
            for (std::size_t y = x + 1; y < bucket.size(); ++y) {
                if (sets.find(bucket[x]) == sets.find(bucket[y])) continue;
                if (edit_distance(words[bucket[x]], words[bucket[y]]) <= 1) sets.unite(bucket[x], bucket[y]);
            }
        }
    }

    // Roots are the smallest index of each component, and words are sorted,
    // so the root word is the lexicographically smallest member.
    std::map<std::string, std::string> class_of;
    for (std::size_t i = 0; i < words.size(); ++i) class_of.emplace(words[i], words[sets.find(i)]);
    return LemmaClassIndex(std::move(class_of));
}

LemmaBag::LemmaBag(std::vector<std::string> classes) : classes_(std::move(classes)) {
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
}

bool LemmaBag::contains(const std::string& class_id) const {
    return std::binary_search(classes_.begin(), classes_.end(), class_id);
}

bool LemmaBag::includes(const LemmaBag& other) const {
    return std::includes(classes_.begin(), classes_.end(), other.classes_.begin(), other.classes_.end());
}

LemmaBag LemmaBag::united(const LemmaBag& other) const {
    std::vector<std::string> merged;
    std::set_union(classes_.begin(), classes_.end(), other.classes_.begin(), other.classes_.end(),
                   std::back_inserter(merged));
    LemmaBag out;
    out.classes_ = std::move(merged);
    return out;
}

std::vector<std::string> content_lemmas(std::string_view text, const Lexicon& lexicon) {
    std::vector<std::string> out;
    for (const auto& token : tokenize(text)) {
        if (lexicon.is_filtered(token)) continue;
        auto lemma = lemmatize(token, lexicon);
        if (lexicon.is_filtered(lemma)) continue;
        out.push_back(std::move(lemma));
    }
    return out;
}

LemmaBag to_bag(std::string_view text, const Lexicon& lexicon, const LemmaClassIndex& index) {
    std::vector<std::string> classes;
    for (const auto& lemma : content_lemmas(text, lexicon)) classes.push_back(index.class_of(lemma));
    return LemmaBag(std::move(classes));
}

}  // namespace hb

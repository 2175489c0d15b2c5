#pragma once
// Ontology subset: concepts with synonyms and parent links.
//
// File format (UTF-8, one JSON object per line, '#' lines ignored):
//   {"id": "C0032285", "preferred": "pneumonia",
//    "synonyms": ["lung inflammation"], "parents": ["C0035204"]}
// "synonyms" and "parents" are optional. Parent ids must resolve and the
// parent links must be acyclic.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hb {

struct OntologyConcept {
    std::string id;
    std::string preferred;
    std::vector<std::string> synonyms;
    std::vector<std::string> parents;

    // Preferred name first, then synonyms; duplicates (by normal form) dropped.
    std::vector<std::string> names() const;
};

class Ontology {
public:
    // Throws ParseError on a duplicate id.
    void add(OntologyConcept oc);
    // Checks parent references and acyclicity, then builds the name index.
    void finalize();

    const std::map<std::string, OntologyConcept>& concepts() const { return concepts_; }
    const OntologyConcept* find(const std::string& id) const;
    // Concept ids having `name` (any form; normalized here) as a name.
    const std::set<std::string>& lookup(const std::string& name) const;

    // (ancestor id, hops) within max_depth parent hops, the concept itself at 0.
    std::vector<std::pair<std::string, int>> ancestors(const std::string& id, int max_depth) const;

    bool empty() const { return concepts_.empty(); }

private:
    std::map<std::string, OntologyConcept> concepts_;
    std::map<std::string, std::set<std::string>> name_index_;
};

Ontology load_ontology(const std::filesystem::path& file);

}  // namespace hb

#include "hb/ontology.hpp"

#include "hb/error.hpp"
#include "hb/textnorm.hpp"

#include <json.hpp>

#include <deque>
#include <fstream>

namespace hb {

namespace {
const std::set<std::string> kNoConcepts;
}

std::vector<std::string> OntologyConcept::names() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto push = [&](const std::string& name) {
        if (!name.empty() && seen.insert(normalize_text(name)).second) out.push_back(name);
    };
    push(preferred);
    for (const auto& s : synonyms) push(s);
    return out;
}

void Ontology::add(OntologyConcept oc) {
    if (oc.id.empty()) throw ParseError("concept without id");
    auto id = oc.id;
    if (!concepts_.emplace(id, std::move(oc)).second) throw ParseError("duplicate concept id " + id);
}

void Ontology::finalize() {
    for (const auto& [id, c] : concepts_)
        for (const auto& p : c.parents)
            if (!concepts_.contains(p)) throw ParseError("concept " + id + " has unknown parent " + p);

    // Kahn's algorithm over child->parent links.
    std::map<std::string, std::size_t> pending;
    std::map<std::string, std::vector<std::string>> children;
    for (const auto& [id, c] : concepts_) {
        pending[id] = c.parents.size();
        for (const auto& p : c.parents) children[p].push_back(id);
    }
    std::deque<std::string> ready;
    for (const auto& [id, n] : pending)
        if (n == 0) ready.push_back(id);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto cur = ready.front();
        ready.pop_front();
        ++seen;
        for (const auto& child : children[cur])
            if (--pending[child] == 0) ready.push_back(child);
    }
    if (seen != concepts_.size()) throw ParseError("ontology parent links contain a cycle");

    name_index_.clear();
    for (const auto& [id, c] : concepts_)
        for (const auto& name : c.names()) name_index_[normalize_text(name)].insert(id);
}

const OntologyConcept* Ontology::find(const std::string& id) const {
    auto it = concepts_.find(id);
    return it == concepts_.end() ? nullptr : &it->second;
}

const std::set<std::string>& Ontology::lookup(const std::string& name) const {
    auto it = name_index_.find(normalize_text(name));
    return it == name_index_.end() ? kNoConcepts : it->second;
}

std::vector<std::pair<std::string, int>> Ontology::ancestors(const std::string& id, int max_depth) const {
    std::vector<std::pair<std::string, int>> out;
    if (!concepts_.contains(id)) return out;
    std::map<std::string, int> depth{{id, 0}};
    std::deque<std::string> queue{id};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        int d = depth[cur];
        out.emplace_back(cur, d);
        if (d == max_depth) continue;
        for (const auto& p : concepts_.at(cur).parents)
            if (depth.emplace(p, d + 1).second) queue.push_back(p);
    }
    return out;
}

Ontology load_ontology(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot read ontology " + file.string());
    Ontology ontology;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            auto record = nlohmann::json::parse(line);
            OntologyConcept c;
            c.id = record.at("id").get<std::string>();
            c.preferred = record.at("preferred").get<std::string>();
            if (record.contains("synonyms")) c.synonyms = record["synonyms"].get<std::vector<std::string>>();
            if (record.contains("parents")) c.parents = record["parents"].get<std::vector<std::string>>();
            ontology.add(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed ontology record: ") + e.what(), number);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), number);
        }
    }
    ontology.finalize();
    return ontology;
}

}  // namespace hb

#include "hb/taxonomy.hpp"

#include "hb/error.hpp"
#include "hb/semantic_merge.hpp"

#include <algorithm>
#include <cmath>

namespace hb {

void TaxonomyConfig::validate() const {
    if (max_ancestor_depth < 0) throw ArgumentError("max_ancestor_depth must be non-negative");
    if (min_governed < 2) throw ArgumentError("min_governed must be at least 2");
}

ConceptLinks link_nodes(const ConceptDag& dag, const Ontology& ontology) {
    ConceptLinks links;
    for (const auto& [id, node] : dag.nodes()) {
        const std::string* best = nullptr;
        for (const auto& m : node.members) {
            const auto& hits = ontology.lookup(m.text);
            if (!hits.empty() && (!best || *hits.begin() < *best)) best = &*hits.begin();
        }
        if (best) links.emplace(id, *best);
    }
    return links;
}

std::vector<GoverningConcept> governing_concepts(const ConceptLinks& links, const Ontology& ontology,
                                                 const TaxonomyConfig& config) {
    config.validate();
    std::map<std::string, std::set<NodeId>> governed;
    for (const auto& [node, oc] : links)
        for (const auto& [ancestor, hops] : ontology.ancestors(oc, config.max_ancestor_depth))
            governed[ancestor].insert(node);

    std::vector<GoverningConcept> out;
    for (auto& [oc, nodes] : governed)
        if (nodes.size() >= config.min_governed) out.push_back({oc, {nodes.begin(), nodes.end()}});
    return out;
}

std::string choose_label(const OntologyConcept& oc, const std::vector<NodeId>& governed, ConceptDag& dag,
                         EmbeddingCache& embeddings) {
    auto names = oc.names();
    if (names.empty()) throw ArgumentError("concept " + oc.id + " has no names");
    if (names.size() == 1) return names.front();

    embeddings.prefetch(names);
    std::vector<const Embedding*> targets;
    for (auto id : governed) targets.push_back(&node_vector(dag.node(id), embeddings));

    constexpr double kTie = 1e-12;
    std::string best;
    double best_score = -2.0;
    for (const auto& name : names) {
        const auto& v = embeddings.get(name);
        double score = 0.0;
        for (const auto* t : targets) score += cosine(v, *t);
        if (!targets.empty()) score /= static_cast<double>(targets.size());

        bool better = score > best_score + kTie;
        if (!better && std::abs(score - best_score) <= kTie)
            better = name.size() < best.size() || (name.size() == best.size() && name < best);
        if (better) {
            best = name;
            best_score = score;
        }
    }
    return best;
}

TaxonomyStats add_taxonomic_nodes(ConceptDag& dag, const Ontology& ontology, const ConceptLinks& links,
                                  EmbeddingCache& embeddings, const TaxonomyConfig& config) {
    config.validate();
    TaxonomyStats stats;

    std::map<std::string, NodeId> present;
    for (const auto& [node, oc] : links) present.emplace(oc, node);  // smallest node id first
    for (const auto& [id, node] : dag.nodes())
        if (node.origin == Origin::taxonomic && node.concept_id) present.emplace(*node.concept_id, id);

    for (const auto& g : governing_concepts(links, ontology, config)) {
        if (auto it = present.find(g.concept_id); it != present.end()) {
            const NodeId owner = it->second;
            for (auto v : g.governed) {
                if (v == owner || !dag.contains(v)) continue;
                if (dag.has_path(owner, v) || dag.has_path(v, owner)) continue;
                dag.add_edge(owner, v);
                ++stats.edges_added;
            }
            continue;
        }
        const auto* oc = ontology.find(g.concept_id);
        ConceptNode node;
        node.origin = Origin::taxonomic;
        node.concept_id = g.concept_id;
        node.label = choose_label(*oc, g.governed, dag, embeddings);
        auto id = dag.add_node(std::move(node));
        for (auto v : g.governed) {
            dag.add_edge(id, v);
            ++stats.edges_added;
        }
        if (dag.root()) dag.add_edge(*dag.root(), id);
        present.emplace(g.concept_id, id);
        ++stats.nodes_added;
    }
    return stats;
}

}  // namespace hb

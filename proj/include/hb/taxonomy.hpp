#pragma once
// Ontology linking and taxonomic hierarchy nodes.

#include "hb/dag.hpp"
#include "hb/embedding.hpp"
#include "hb/ontology.hpp"

#include <map>
#include <string>
#include <vector>

namespace hb {

struct TaxonomyConfig {
    int max_ancestor_depth = 3;
    std::size_t min_governed = 2;

    void validate() const;
};

using ConceptLinks = std::map<NodeId, std::string>;

// Exact (normalized) match of any member against the ontology names; the
// smallest matching concept id wins. Taxonomic nodes are not linked here.
ConceptLinks link_nodes(const ConceptDag& dag, const Ontology& ontology);

struct GoverningConcept {
    std::string concept_id;
    std::vector<NodeId> governed;  // sorted

    bool operator==(const GoverningConcept&) const = default;
};

// Concepts that are a linked concept or one of its ancestors within
// max_ancestor_depth hops, for at least min_governed nodes. Sorted by id.
std::vector<GoverningConcept> governing_concepts(const ConceptLinks& links, const Ontology& ontology,
                                                 const TaxonomyConfig& config);

// Name of `oc` with the highest mean cosine to the governed nodes;
// ties go to the shorter name, then the lexicographically smaller one.
std::string choose_label(const OntologyConcept& oc, const std::vector<NodeId>& governed, ConceptDag& dag,
                         EmbeddingCache& embeddings);

struct TaxonomyStats {
    std::size_t nodes_added = 0;
    std::size_t edges_added = 0;  // edges to governed nodes
};

// Governing concepts already present (a linked node, or a taxonomic node for
// that concept) gain edges to governed nodes they cannot reach yet, unless
// the edge would close a cycle. Absent concepts become new taxonomic nodes
// under the root with an edge to every governed node.
TaxonomyStats add_taxonomic_nodes(ConceptDag& dag, const Ontology& ontology, const ConceptLinks& links,
                                  EmbeddingCache& embeddings, const TaxonomyConfig& config);

}  // namespace hb

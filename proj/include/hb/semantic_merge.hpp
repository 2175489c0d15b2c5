#pragma once
// Embedding-based and ontology-based merging of equivalent DAG nodes.

#include "hb/dag.hpp"
#include "hb/embedding.hpp"
#include "hb/ontology.hpp"

namespace hb {

struct MergeConfig {
    double t1 = 0.9;   // sibling merge threshold
    double t2 = 0.95;  // parent-child merge threshold

    // Requires 0 < t1 <= t2 <= 1.
    void validate() const;
};

// Normalized mean of the member vectors (taxonomic nodes: their label),
// cached on the node. Nodes with nothing to embed get an empty vector.
const Embedding& node_vector(ConceptNode& node, EmbeddingCache& embeddings);

struct SemanticMergeStats {
    std::size_t sibling_merges = 0;
    std::size_t parent_child_merges = 0;
    std::size_t total() const { return sibling_merges + parent_child_merges; }
};

// Pass 1: DFS from the root; at each node merge children pairs with cosine
// >= t1 until no pair qualifies. Pass 2: merge parent-child pairs with
// cosine >= t2. Merges that would close a cycle are skipped. All member
// texts are embedded before the first mutation, so a provider failure
// leaves the DAG untouched.
SemanticMergeStats merge_semantic(ConceptDag& dag, EmbeddingCache& embeddings, const MergeConfig& config);

// Merges nodes whose members name the same ontology concept. A merge that
// closes a cycle is repaired by deleting every edge into the merged node
// from one of its descendants. Returns the number of merges.
std::size_t merge_ontology_synonyms(ConceptDag& dag, const Ontology& ontology);

}  // namespace hb

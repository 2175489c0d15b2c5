#pragma once
// Pruning, single-child collapse, entry-point selection and display order.

#include "hb/dag.hpp"
#include "hb/embedding.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hb {

struct EntryPointConfig {
    std::size_t k = 50;
    double affinity_floor = 0.0;

    void validate() const;
};

struct NavigationResult {
    std::vector<NodeId> entry_points;  // selection order
    // Synthetic node (not part of the DAG) whose children are the inputs no
    // entry point reaches. Its id is the DAG's next free id.
    NodeId other_node = 0;
    // Ordered child lists for every DAG node plus other_node.
    std::map<NodeId, std::vector<NodeId>> display_order;

    const std::vector<NodeId>& other_children() const;
    bool operator==(const NavigationResult&) const = default;
};

// Display string: best input member (count desc, then shorter, then
// lexicographic), else best member; taxonomic nodes show their label.
std::string choose_representative(const ConceptNode& node);
// The cached representative when present, otherwise choose_representative.
std::string representative_of(const ConceptNode& node);
void assign_representatives(ConceptDag& dag);

struct CoverCandidate {
    std::vector<NodeId> covers;  // sorted
    std::uint64_t total_count = 0;
    std::string representative;
    NodeId id = 0;
};

// Greedy set cover of `universe` (sorted). Each step takes the candidate
// covering the most uncovered elements; ties go to larger total_count, then
// smaller representative, then smaller id. Stops when the universe is
// covered or nothing adds coverage. Returns candidate indices in pick order.
std::vector<std::size_t> greedy_cover(const std::vector<NodeId>& universe,
                                      const std::vector<CoverCandidate>& candidates);

struct PruneStats {
    std::size_t edges_removed = 0;
    std::size_t nodes_removed = 0;
};

// Top-down: each node keeps a greedy minimal set of children that still
// reaches all of its reachable inputs; nodes cut off from the root go.
PruneStats prune_children(ConceptDag& dag);

// Removes non-root nodes with exactly one child and no input member,
// linking their parents to the child. Returns the number removed.
std::size_t collapse_single_child(ConceptDag& dag);

// Greedy+ style selection over all non-root nodes, with affinity-weighted
// marginal gains. Fills entry_points, other_node and display_order.
NavigationResult select_entry_points(ConceptDag& dag, EmbeddingCache& embeddings, const EntryPointConfig& config);

// Children by descending reachable-input count, then descending total
// count, then representative, then id.
std::map<NodeId, std::vector<NodeId>> display_order(const ConceptDag& dag);

}  // namespace hb

#pragma once
// Concept DAG: nodes seeded from equivalence sets, specificity edges, head
// roots and the graph primitives shared by the later stages.

#include "hb/grouping.hpp"
#include "hb/textnorm.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hb {

using NodeId = std::uint32_t;

enum class Origin { input, substring, head, taxonomic, root };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view name);

struct MemberString {
    std::string text;
    std::uint64_t count = 0;
    bool is_input = false;

    bool operator==(const MemberString&) const = default;
};

struct ConceptNode {
    NodeId id = 0;
    std::vector<MemberString> members;
    LemmaBag bag;
    Origin origin = Origin::substring;
    // Unit-normalized mean of the member vectors; empty until computed and
    // cleared by merges.
    std::vector<float> vector;
    std::optional<std::string> representative;
    // Set on taxonomic nodes: the ontology concept and its chosen synonym.
    std::optional<std::string> concept_id;
    std::optional<std::string> label;

    bool has_input() const;
    std::size_t input_member_count() const;
    std::uint64_t total_count() const;
};

class ConceptDag {
public:
    // Assigns the next sequential id (ids are never reused).
    NodeId add_node(ConceptNode node);
    void remove_node(NodeId id);

    bool contains(NodeId id) const { return nodes_.contains(id); }
    const ConceptNode& node(NodeId id) const;
    ConceptNode& node(NodeId id);
    const std::map<NodeId, ConceptNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    const std::set<NodeId>& children(NodeId id) const;
    const std::set<NodeId>& parents(NodeId id) const;

    // False when the edge already exists. Self-edges are rejected.
    bool add_edge(NodeId parent, NodeId child);
    bool remove_edge(NodeId parent, NodeId child);
    bool has_edge(NodeId parent, NodeId child) const;
    std::size_t edge_count() const { return edge_count_; }
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    std::optional<NodeId> root() const { return root_; }
    void set_root(NodeId id);

    // Directed path of length >= 0 (a node reaches itself).
    bool has_path(NodeId from, NodeId to) const;
    // Nodes reachable from `id` through at least one edge.
    std::set<NodeId> descendants(NodeId id) const;
    std::set<NodeId> reachable_from_root() const;

    bool is_acyclic() const;
    // Parents before children, ties by id. Throws InvariantError on a cycle.
    std::vector<NodeId> topological_order() const;

    // Unchecked merge of b into a (or a into b): the smaller id survives.
    // Members are united (dedup by normalized text), bags united, edges
    // rewired, self-edges dropped. May leave a cycle behind.
    NodeId merge(NodeId a, NodeId b);

    std::size_t merges_performed() const { return merges_; }
    NodeId next_id() const { return next_id_; }
    // Only used when restoring a serialized DAG.
    void set_next_id(NodeId next) { next_id_ = next; }
    NodeId insert_with_id(ConceptNode node);

private:
    std::map<NodeId, ConceptNode> nodes_;
    std::unordered_map<NodeId, std::set<NodeId>> children_;
    std::unordered_map<NodeId, std::set<NodeId>> parents_;
    std::optional<NodeId> root_;
    NodeId next_id_ = 0;
    std::size_t edge_count_ = 0;
    std::size_t merges_ = 0;
};

// One node per equivalence set, edges forming the Hasse diagram of strict
// bag containment. Empty-bag sets stay unconnected.
ConceptDag build_dag(const std::vector<EquivalenceSet>& sets);

// Ensures a node per distinct head-word class (reusing a node whose bag is
// exactly that class) above the nodes containing the class, then attaches a
// single root above every parentless node.
void add_head_roots(ConceptDag& dag, const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon,
                    const LemmaClassIndex& index);

// Creates the root node (if missing) and links it to every parentless node.
NodeId attach_root(ConceptDag& dag);

// Sorted ids of origin=input nodes reachable from `id`, itself included.
std::vector<NodeId> reachable_inputs(const ConceptDag& dag, NodeId id);

// reachable_inputs for every node at once.
std::unordered_map<NodeId, std::vector<NodeId>> all_reachable_inputs(const ConceptDag& dag);

// True iff a path of length >= 2 joins a and b in either direction.
bool would_create_cycle(const ConceptDag& dag, NodeId a, NodeId b);

// Checked merge: throws MergeRejected when would_create_cycle holds.
NodeId merge_nodes(ConceptDag& dag, NodeId a, NodeId b);

}  // namespace hb

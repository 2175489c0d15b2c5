#include "hb/semantic_merge.hpp"

#include "hb/error.hpp"
#include "hb/refine.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <tuple>

namespace hb {

namespace {

std::vector<std::string> texts_of(const ConceptNode& node) {
    std::vector<std::string> out;
    for (const auto& m : node.members) out.push_back(m.text);
    if (out.empty() && node.label) out.push_back(*node.label);
    return out;
}

double node_similarity(ConceptDag& dag, NodeId a, NodeId b, EmbeddingCache& embeddings) {
    const auto& va = node_vector(dag.node(a), embeddings);
    const auto& vb = node_vector(dag.node(b), embeddings);
    return cosine(va, vb);
}

std::vector<NodeId> children_by_representative(const ConceptDag& dag, NodeId id) {
    std::vector<std::pair<std::string, NodeId>> keyed;
    for (auto c : dag.children(id)) keyed.emplace_back(representative_of(dag.node(c)), c);
    std::sort(keyed.begin(), keyed.end());
    std::vector<NodeId> out;
    for (auto& [rep, c] : keyed) out.push_back(c);
    return out;
}

// Merges qualifying child pairs of `parent` until a full sweep finds none.
std::size_t merge_children(ConceptDag& dag, NodeId parent, EmbeddingCache& embeddings, double threshold) {
    std::size_t merges = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        auto kids = children_by_representative(dag, parent);
        constexpr NodeId kGone = std::numeric_limits<NodeId>::max();
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (kids[i] == kGone) continue;
            for (std::size_t j = i + 1; j < kids.size(); ++j) {
                if (kids[j] == kGone) continue;
                if (node_similarity(dag, kids[i], kids[j], embeddings) < threshold) continue;
                if (would_create_cycle(dag, kids[i], kids[j])) continue;
                // The survivor takes slot i and is compared against the rest.
                kids[i] = dag.merge(kids[i], kids[j]);
                kids[j] = kGone;
                ++merges;
                changed = true;
            }
        }
    }
    return merges;
}

}  // namespace

void MergeConfig::validate() const {
    if (!(t1 > 0.0 && t1 <= t2 && t2 <= 1.0))
        throw ArgumentError("merge thresholds must satisfy 0 < t1 <= t2 <= 1");
}

const Embedding& node_vector(ConceptNode& node, EmbeddingCache& embeddings) {
    if (!node.vector.empty()) return node.vector;
    auto texts = texts_of(node);
    if (texts.empty()) return node.vector;
    embeddings.prefetch(texts);
    Embedding mean;
    for (const auto& t : texts) {
        const auto& v = embeddings.get(t);
        if (mean.empty()) mean.assign(v.size(), 0.0f);
        for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<float>(texts.size());
    normalize(mean);
    node.vector = std::move(mean);
    return node.vector;
}

SemanticMergeStats merge_semantic(ConceptDag& dag, EmbeddingCache& embeddings, const MergeConfig& config) {
    config.validate();
    if (!dag.root()) throw ArgumentError("semantic merging needs a rooted DAG");

    std::vector<std::string> all_texts;
    for (const auto& [id, node] : dag.nodes())
        for (auto& t : texts_of(node)) all_texts.push_back(std::move(t));
    embeddings.prefetch(all_texts);

    SemanticMergeStats stats;
    const NodeId root = *dag.root();

    // Pass 1: sibling merges in DFS preorder.
    std::set<NodeId> visited;
    std::function<void(NodeId)> visit = [&](NodeId id) {
        if (!dag.contains(id) || !visited.insert(id).second) return;
        stats.sibling_merges += merge_children(dag, id, embeddings, config.t1);
        for (auto c : children_by_representative(dag, id)) visit(c);
    };
    visit(root);

    // Pass 2: parent-child merges over a snapshot of the edges.
    struct Edge {
        std::string parent_rep, child_rep;
        NodeId parent, child;
    };
    std::vector<Edge> snapshot;
    for (auto [p, c] : dag.edges()) {
        if (p == root) continue;
        snapshot.push_back({representative_of(dag.node(p)), representative_of(dag.node(c)), p, c});
    }
    std::sort(snapshot.begin(), snapshot.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.parent_rep, a.child_rep, a.parent, a.child) <
               std::tie(b.parent_rep, b.child_rep, b.parent, b.child);
    });
    std::map<NodeId, NodeId> forward;
    auto resolve = [&](NodeId id) {
        while (forward.contains(id)) id = forward[id];
        return id;
    };
    for (const auto& e : snapshot) {
        auto p = resolve(e.parent);
        auto c = resolve(e.child);
        if (p == c || p == root || c == root || !dag.has_edge(p, c)) continue;
        if (node_similarity(dag, p, c, embeddings) < config.t2) continue;
        if (would_create_cycle(dag, p, c)) continue;
        auto keep = dag.merge(p, c);
        forward[keep == p ? c : p] = keep;
        ++stats.parent_child_merges;
    }
    return stats;
}

std::size_t merge_ontology_synonyms(ConceptDag& dag, const Ontology& ontology) {
    std::map<std::string, std::vector<NodeId>> by_concept;
    for (const auto& [id, node] : dag.nodes()) {
        if (node.origin == Origin::root) continue;
        std::set<std::string> concepts;
        for (const auto& m : node.members)
            for (const auto& c : ontology.lookup(m.text)) concepts.insert(c);
        for (const auto& c : concepts) by_concept[c].push_back(id);
    }

    std::map<NodeId, NodeId> forward;
    auto resolve = [&](NodeId id) {
        while (forward.contains(id)) id = forward[id];
        return id;
    };
    std::size_t merges = 0;
    for (const auto& [oc, nodes] : by_concept) {
        std::set<NodeId> current;
        for (auto n : nodes) current.insert(resolve(n));
        if (current.size() < 2) continue;
        NodeId merged = *current.begin();
        for (auto it = std::next(current.begin()); it != current.end(); ++it) {
            auto other = *it;
            auto keep = dag.merge(merged, other);
            forward[keep == merged ? other : merged] = keep;
            merged = keep;
            ++merges;
            auto below = dag.descendants(merged);
            if (below.contains(merged)) {
                for (auto p : std::set<NodeId>(dag.parents(merged)))
                    if (below.contains(p)) dag.remove_edge(p, merged);
            }
        }
    }
    return merges;
}

}  // namespace hb

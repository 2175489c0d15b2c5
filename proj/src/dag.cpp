#include "hb/dag.hpp"

#include "hb/error.hpp"
#include "hb/expansion.hpp"

#include <algorithm>
#include <queue>

namespace hb {

namespace {

const std::set<NodeId> kNoNodes;

int precedence(Origin origin) {
    switch (origin) {
        case Origin::root: return 4;
        case Origin::input: return 3;
        case Origin::taxonomic: return 2;
        case Origin::head: return 1;
        case Origin::substring: return 0;
    }
    return 0;
}

std::vector<NodeId> sorted_union(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::vector<NodeId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::string_view to_string(Origin origin) {
    switch (origin) {
        case Origin::input: return "input";
        case Origin::substring: return "substring";
        case Origin::head: return "head";
        case Origin::taxonomic: return "taxonomic";
        case Origin::root: return "root";
    }
    return "substring";
}

Origin origin_from_string(std::string_view name) {
    for (auto o : {Origin::input, Origin::substring, Origin::head, Origin::taxonomic, Origin::root})
        if (to_string(o) == name) return o;
    throw ParseError("unknown node origin \"" + std::string(name) + "\"");
}

bool ConceptNode::has_input() const {
    return std::any_of(members.begin(), members.end(), [](const auto& m) { return m.is_input; });
}

std::size_t ConceptNode::input_member_count() const {
    return static_cast<std::size_t>(
        std::count_if(members.begin(), members.end(), [](const auto& m) { return m.is_input; }));
}

std::uint64_t ConceptNode::total_count() const {
    std::uint64_t total = 0;
    for (const auto& m : members) total += m.count;
    return total;
}

NodeId ConceptDag::add_node(ConceptNode node) {
    node.id = next_id_++;
    return insert_with_id(std::move(node));
}

NodeId ConceptDag::insert_with_id(ConceptNode node) {
    const NodeId id = node.id;
    if (nodes_.contains(id)) throw ArgumentError("duplicate node id " + std::to_string(id));
    next_id_ = std::max(next_id_, id + 1);
    nodes_.emplace(id, std::move(node));
    children_[id];
    parents_[id];
    return id;
}

void ConceptDag::remove_node(NodeId id) {
    if (!contains(id)) throw ArgumentError("unknown node " + std::to_string(id));
    for (auto c : std::set<NodeId>(children_[id])) remove_edge(id, c);
    for (auto p : std::set<NodeId>(parents_[id])) remove_edge(p, id);
    children_.erase(id);
    parents_.erase(id);
    nodes_.erase(id);
    if (root_ == id) root_.reset();
}

const ConceptNode& ConceptDag::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw ArgumentError("unknown node " + std::to_string(id));
    return it->second;
}

ConceptNode& ConceptDag::node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw ArgumentError("unknown node " + std::to_string(id));
    return it->second;
}

const std::set<NodeId>& ConceptDag::children(NodeId id) const {
    auto it = children_.find(id);
    return it == children_.end() ? kNoNodes : it->second;
}

const std::set<NodeId>& ConceptDag::parents(NodeId id) const {
    auto it = parents_.find(id);
    return it == parents_.end() ? kNoNodes : it->second;
}

bool ConceptDag::add_edge(NodeId parent, NodeId child) {
    if (parent == child) throw ArgumentError("self-edge on node " + std::to_string(parent));
    if (!contains(parent) || !contains(child))
        throw ArgumentError("edge endpoint missing: " + std::to_string(parent) + "->" + std::to_string(child));
    if (!children_[parent].insert(child).second) return false;
    parents_[child].insert(parent);
    ++edge_count_;
    return true;
}

bool ConceptDag::remove_edge(NodeId parent, NodeId child) {
    auto it = children_.find(parent);
    if (it == children_.end() || !it->second.erase(child)) return false;
    parents_[child].erase(parent);
    --edge_count_;
    return true;
}

bool ConceptDag::has_edge(NodeId parent, NodeId child) const {
    return children(parent).contains(child);
}

std::vector<std::pair<NodeId, NodeId>> ConceptDag::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (const auto& [id, node] : nodes_)
        for (auto c : children(id)) out.emplace_back(id, c);
    return out;
}

void ConceptDag::set_root(NodeId id) {
    if (!contains(id)) throw ArgumentError("unknown root " + std::to_string(id));
    root_ = id;
}

bool ConceptDag::has_path(NodeId from, NodeId to) const {
    if (from == to) return true;
    std::vector<NodeId> stack{from};
    std::set<NodeId> seen{from};
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (auto c : children(cur)) {
            if (c == to) return true;
            if (seen.insert(c).second) stack.push_back(c);
        }
    }
    return false;
}

std::set<NodeId> ConceptDag::descendants(NodeId id) const {
    std::set<NodeId> seen;
    std::vector<NodeId> stack(children(id).begin(), children(id).end());
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        for (auto c : children(cur)) stack.push_back(c);
    }
    return seen;
}

std::set<NodeId> ConceptDag::reachable_from_root() const {
    if (!root_) return {};
    auto out = descendants(*root_);
    out.insert(*root_);
    return out;
}

bool ConceptDag::is_acyclic() const {
    std::map<NodeId, std::size_t> indegree;
    for (const auto& [id, node] : nodes_) indegree[id] = parents(id).size();
    std::vector<NodeId> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.push_back(id);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto cur = ready.back();
        ready.pop_back();
        ++visited;
        for (auto c : children(cur))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return visited == nodes_.size();
}

std::vector<NodeId> ConceptDag::topological_order() const {
    std::map<NodeId, std::size_t> indegree;
    for (const auto& [id, node] : nodes_) indegree[id] = parents(id).size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.push(id);
    std::vector<NodeId> order;
    order.reserve(nodes_.size());
    while (!ready.empty()) {
        auto cur = ready.top();
        ready.pop();
        order.push_back(cur);
        for (auto c : children(cur))
            if (--indegree[c] == 0) ready.push(c);
    }
    if (order.size() != nodes_.size()) throw InvariantError("concept graph contains a cycle");
    return order;
}

NodeId ConceptDag::merge(NodeId a, NodeId b) {
    if (a == b) throw ArgumentError("cannot merge a node with itself");
    if (root_ == a || root_ == b) throw ArgumentError("the root cannot be merged");
    const NodeId keep = std::min(a, b);
    const NodeId gone = std::max(a, b);
    ConceptNode& kept = node(keep);
    ConceptNode& other = node(gone);

    for (auto& m : other.members) {
        auto key = normalize_text(m.text);
        auto it = std::find_if(kept.members.begin(), kept.members.end(),
                               [&](const auto& k) { return normalize_text(k.text) == key; });
        if (it == kept.members.end()) {
            kept.members.push_back(std::move(m));
        } else {
            it->count = std::max(it->count, m.count);
            it->is_input = it->is_input || m.is_input;
        }
    }
    kept.bag = kept.bag.united(other.bag);
    if (precedence(other.origin) > precedence(kept.origin)) kept.origin = other.origin;
    if (kept.has_input()) kept.origin = Origin::input;
    if (!kept.concept_id) kept.concept_id = other.concept_id;
    if (!kept.label) kept.label = other.label;
    kept.vector.clear();
    kept.representative.reset();

    auto gone_children = children(gone);
    auto gone_parents = parents(gone);
    remove_node(gone);
    for (auto c : gone_children)
        if (c != keep) add_edge(keep, c);
    for (auto p : gone_parents)
        if (p != keep) add_edge(p, keep);
    ++merges_;
    return keep;
}

ConceptDag build_dag(const std::vector<EquivalenceSet>& sets) {
    ConceptDag dag;
    std::map<LemmaBag, NodeId> by_bag;
    std::vector<NodeId> ids;
    for (const auto& set : sets) {
        ConceptNode node;
        for (const auto& m : set.members) node.members.push_back({m.text, m.count, m.is_input});
        node.bag = set.bag;
        node.origin = set.is_input ? Origin::input : Origin::substring;
        auto id = dag.add_node(std::move(node));
        ids.push_back(id);
        if (!set.bag.empty()) by_bag.emplace(set.bag, id);
    }

    constexpr std::size_t kMaxEnumeratedBag = 12;
    for (auto id : ids) {
        const auto& bag = dag.node(id).bag;
        if (bag.size() < 2) continue;

        std::vector<NodeId> below;  // nodes whose bag is strictly contained
        if (bag.size() <= kMaxEnumeratedBag) {
            const auto& classes = bag.classes();
            const std::uint32_t full = (1u << classes.size()) - 1;
            for (std::uint32_t mask = 1; mask < full; ++mask) {
                std::vector<std::string> sub;
                for (std::size_t i = 0; i < classes.size(); ++i)
                    if (mask & (1u << i)) sub.push_back(classes[i]);
                if (auto it = by_bag.find(LemmaBag(std::move(sub))); it != by_bag.end()) below.push_back(it->second);
            }
        } else {
            for (const auto& [other_bag, other] : by_bag)
                if (bag.strictly_includes(other_bag)) below.push_back(other);
        }
        // Parents are the maximal elements of `below`.
        for (auto candidate : below) {
            const auto& cbag = dag.node(candidate).bag;
            bool maximal = std::none_of(below.begin(), below.end(), [&](NodeId other) {
                return dag.node(other).bag.strictly_includes(cbag);
            });
            if (maximal) dag.add_edge(candidate, id);
        }
    }
    return dag;
}

NodeId attach_root(ConceptDag& dag) {
    NodeId root;
    if (dag.root()) {
        root = *dag.root();
    } else {
        ConceptNode node;
        node.origin = Origin::root;
        node.representative = "root";
        root = dag.add_node(std::move(node));
        dag.set_root(root);
    }
    for (const auto& [id, node] : dag.nodes())
        if (id != root && dag.parents(id).empty()) dag.add_edge(root, id);
    return root;
}

void add_head_roots(ConceptDag& dag, const std::vector<AnnotatedSpan>& spans, const Lexicon& lexicon,
                    const LemmaClassIndex& index) {
    // class id -> smallest head surface form seen for it
    std::map<std::string, std::string> heads;
    for (const auto& span : spans) {
        if (tokenize(span.text).empty() && !span.tokens) continue;
        auto form = head_form(span, lexicon);
        if (form.empty() || lexicon.is_filtered(form)) continue;
        auto lemma = lemmatize(form, lexicon);
        if (lexicon.is_filtered(lemma)) continue;
        const auto& cls = index.class_of(lemma);
        auto [it, inserted] = heads.emplace(cls, form);
        if (!inserted && form < it->second) it->second = form;
    }

    std::map<LemmaBag, NodeId> by_bag;
    for (const auto& [id, node] : dag.nodes())
        if (!node.bag.empty()) by_bag.emplace(node.bag, id);

    for (const auto& [cls, form] : heads) {
        LemmaBag single({cls});
        if (auto it = by_bag.find(single); it != by_bag.end()) {
            auto& existing = dag.node(it->second);
            if (existing.origin == Origin::substring) existing.origin = Origin::head;
            continue;
        }
        // Minimal nodes containing the class: no parent also contains it.
        std::vector<NodeId> targets;
        for (const auto& [id, node] : dag.nodes()) {
            if (!node.bag.contains(cls)) continue;
            const auto& ps = dag.parents(id);
            bool covered = std::any_of(ps.begin(), ps.end(), [&](NodeId p) { return dag.node(p).bag.contains(cls); });
            if (!covered) targets.push_back(id);
        }
        ConceptNode head;
        head.members.push_back({form, 0, false});
        head.bag = single;
        head.origin = Origin::head;
        auto id = dag.add_node(std::move(head));
        by_bag.emplace(single, id);
        for (auto t : targets) dag.add_edge(id, t);
    }
    attach_root(dag);
}

std::vector<NodeId> reachable_inputs(const ConceptDag& dag, NodeId id) {
    if (!dag.contains(id)) throw ArgumentError("unknown node " + std::to_string(id));
    std::vector<NodeId> out;
    if (dag.node(id).origin == Origin::input) out.push_back(id);
    for (auto d : dag.descendants(id))
        if (dag.node(d).origin == Origin::input) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

std::unordered_map<NodeId, std::vector<NodeId>> all_reachable_inputs(const ConceptDag& dag) {
    auto order = dag.topological_order();
    std::unordered_map<NodeId, std::vector<NodeId>> reach;
    reach.reserve(order.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::vector<NodeId> acc;
        if (dag.node(*it).origin == Origin::input) acc.push_back(*it);
        for (auto c : dag.children(*it)) acc = sorted_union(acc, reach[c]);
        reach[*it] = std::move(acc);
    }
    return reach;
}

bool would_create_cycle(const ConceptDag& dag, NodeId a, NodeId b) {
    auto long_path = [&](NodeId from, NodeId to) {
        for (auto c : dag.children(from))
            if (c != to && dag.has_path(c, to)) return true;
        return false;
    };
    return long_path(a, b) || long_path(b, a);
}

NodeId merge_nodes(ConceptDag& dag, NodeId a, NodeId b) {
    if (a == b) throw ArgumentError("cannot merge a node with itself");
    if (would_create_cycle(dag, a, b))
        throw MergeRejected("merging " + std::to_string(a) + " and " + std::to_string(b) + " would create a cycle");
    return dag.merge(a, b);
}

}  // namespace hb

#include "hb/refine.hpp"

#include "hb/error.hpp"
#include "hb/semantic_merge.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace hb {

namespace {

constexpr double kScoreEps = 1e-9;

bool member_better(const MemberString& a, const MemberString& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.text.size() != b.text.size()) return a.text.size() < b.text.size();
    return a.text < b.text;
}

std::vector<NodeId> ordered_children(const ConceptDag& dag, const std::vector<NodeId>& kids,
                                     const std::unordered_map<NodeId, std::vector<NodeId>>& reach) {
    struct Key {
        std::size_t reach;
        std::uint64_t count;
        std::string rep;
        NodeId id;
    };
    std::vector<Key> keys;
    keys.reserve(kids.size());
    for (auto c : kids) {
        const auto& n = dag.node(c);
        keys.push_back({reach.at(c).size(), n.total_count(), representative_of(n), c});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.reach != b.reach) return a.reach > b.reach;
        if (a.count != b.count) return a.count > b.count;
        return std::tie(a.rep, a.id) < std::tie(b.rep, b.id);
    });
    std::vector<NodeId> out;
    out.reserve(keys.size());
    for (const auto& k : keys) out.push_back(k.id);
    return out;
}

}  // namespace

void EntryPointConfig::validate() const {
    if (k < 1) throw ArgumentError("k must be at least 1");
}

const std::vector<NodeId>& NavigationResult::other_children() const {
    static const std::vector<NodeId> kNone;
    auto it = display_order.find(other_node);
    return it == display_order.end() ? kNone : it->second;
}

std::string choose_representative(const ConceptNode& node) {
    if (node.origin == Origin::taxonomic && node.label) return *node.label;
    if (node.members.empty()) {
        if (node.label) return *node.label;
        return node.origin == Origin::root ? "root" : "";
    }
    const MemberString* best = nullptr;
    for (const auto& m : node.members) {
        if (!best || (m.is_input && !best->is_input) || (m.is_input == best->is_input && member_better(m, *best)))
            best = &m;
    }
    return best->text;
}

std::string representative_of(const ConceptNode& node) {
    return node.representative ? *node.representative : choose_representative(node);
}

void assign_representatives(ConceptDag& dag) {
    std::vector<NodeId> ids;
    for (const auto& [id, node] : dag.nodes()) ids.push_back(id);
    for (auto id : ids) {
        auto& node = dag.node(id);
        node.representative = choose_representative(node);
    }
}

std::vector<std::size_t> greedy_cover(const std::vector<NodeId>& universe,
                                      const std::vector<CoverCandidate>& candidates) {
    std::unordered_map<NodeId, std::size_t> slot;
    for (std::size_t i = 0; i < universe.size(); ++i) slot.emplace(universe[i], i);
    std::vector<std::vector<std::size_t>> covers(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        for (auto v : candidates[c].covers)
            if (auto it = slot.find(v); it != slot.end()) covers[c].push_back(it->second);

    std::vector<bool> covered(universe.size(), false);
    std::vector<bool> used(candidates.size(), false);
    std::size_t remaining = universe.size();
    std::vector<std::size_t> picks;
    while (remaining > 0) {
        std::size_t best = candidates.size();
        std::size_t best_gain = 0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (used[c]) continue;
            std::size_t gain = 0;
            for (auto s : covers[c]) gain += covered[s] ? 0 : 1;
            if (gain == 0) continue;
            bool better = best == candidates.size() || gain > best_gain;
            if (!better && gain == best_gain) {
                const auto& a = candidates[c];
                const auto& b = candidates[best];
                if (a.total_count != b.total_count) better = a.total_count > b.total_count;
                else better = std::tie(a.representative, a.id) < std::tie(b.representative, b.id);
            }
            if (better) {
                best = c;
                best_gain = gain;
            }
        }
        if (best == candidates.size()) break;
        used[best] = true;
        picks.push_back(best);
        for (auto s : covers[best]) {
            if (!covered[s]) {
                covered[s] = true;
                --remaining;
            }
        }
    }
    return picks;
}

PruneStats prune_children(ConceptDag& dag) {
    PruneStats stats;
    const auto reach = all_reachable_inputs(dag);
    for (auto parent : dag.topological_order()) {
        const auto& kids = dag.children(parent);
        if (kids.size() <= 1) continue;

        std::vector<NodeId> universe;
        for (auto v : reach.at(parent))
            if (v != parent) universe.push_back(v);
        std::vector<CoverCandidate> candidates;
        for (auto c : kids) {
            const auto& n = dag.node(c);
            candidates.push_back({reach.at(c), n.total_count(), representative_of(n), c});
        }
        std::vector<bool> keep(candidates.size(), false);
        for (auto i : greedy_cover(universe, candidates)) keep[i] = true;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!keep[i]) {
                dag.remove_edge(parent, candidates[i].id);
                ++stats.edges_removed;
            }
        }
    }

    if (dag.root()) {
        auto alive = dag.reachable_from_root();
        std::vector<NodeId> dead;
        for (const auto& [id, node] : dag.nodes())
            if (!alive.contains(id)) dead.push_back(id);
        for (auto id : dead) {
            stats.edges_removed += dag.children(id).size();
            dag.remove_node(id);
            ++stats.nodes_removed;
        }
    }
    return stats;
}

std::size_t collapse_single_child(ConceptDag& dag) {
    std::size_t removed = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<NodeId> ids;
        for (const auto& [id, node] : dag.nodes()) ids.push_back(id);
        for (auto id : ids) {
            if (!dag.contains(id) || dag.root() == id) continue;
            if (dag.children(id).size() != 1 || dag.node(id).has_input()) continue;
            const NodeId child = *dag.children(id).begin();
            auto parents = dag.parents(id);
            dag.remove_node(id);
            for (auto p : parents) dag.add_edge(p, child);
            ++removed;
            changed = true;
        }
    }
    return removed;
}

std::map<NodeId, std::vector<NodeId>> display_order(const ConceptDag& dag) {
    const auto reach = all_reachable_inputs(dag);
    std::map<NodeId, std::vector<NodeId>> out;
    for (const auto& [id, node] : dag.nodes()) {
        const auto& kids = dag.children(id);
        out[id] = ordered_children(dag, {kids.begin(), kids.end()}, reach);
    }
    return out;
}

NavigationResult select_entry_points(ConceptDag& dag, EmbeddingCache& embeddings, const EntryPointConfig& config) {
    config.validate();
    const auto reach = all_reachable_inputs(dag);

    std::vector<NodeId> candidates;
    std::vector<NodeId> inputs;
    for (const auto& [id, node] : dag.nodes()) {
        if (dag.root() == id) continue;
        candidates.push_back(id);
        if (node.origin == Origin::input) inputs.push_back(id);
    }
    std::unordered_map<NodeId, std::size_t> input_slot;
    for (std::size_t i = 0; i < inputs.size(); ++i) input_slot.emplace(inputs[i], i);

    std::vector<std::string> texts;
    for (auto id : candidates) {
        const auto& n = dag.node(id);
        for (const auto& m : n.members) texts.push_back(m.text);
        if (n.members.empty() && n.label) texts.push_back(*n.label);
    }
    embeddings.prefetch(texts);

    auto affinity = [&](NodeId c, NodeId v) {
        const auto& vc = node_vector(dag.node(c), embeddings);
        const auto& vv = node_vector(dag.node(v), embeddings);
        return std::max(config.affinity_floor, cosine(vc, vv));
    };

    std::vector<double> score(candidates.size(), 0.0);
    std::vector<std::string> reps(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (auto v : reach.at(candidates[i])) score[i] += affinity(candidates[i], v);
        reps[i] = representative_of(dag.node(candidates[i]));
    }

    NavigationResult nav;
    std::vector<bool> picked(candidates.size(), false);
    std::vector<bool> reached(inputs.size(), false);
    std::vector<double> pick_affinity(inputs.size(), 0.0);
    std::vector<bool> in_pick(inputs.size(), false);
    while (nav.entry_points.size() < config.k) {
        std::size_t best = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (picked[i]) continue;
            if (best == candidates.size()) {
                best = i;
                continue;
            }
            const double diff = score[i] - score[best];
            if (diff > kScoreEps) {
                best = i;
            } else if (diff >= -kScoreEps) {
                auto ri = reach.at(candidates[i]).size();
                auto rb = reach.at(candidates[best]).size();
                if (ri > rb || (ri == rb && std::tie(reps[i], candidates[i]) < std::tie(reps[best], candidates[best])))
                    best = i;
            }
        }
        if (best == candidates.size()) break;
        if (score[best] <= kScoreEps && std::all_of(reached.begin(), reached.end(), [](bool r) { return r; })) break;

        picked[best] = true;
        const NodeId chosen = candidates[best];
        nav.entry_points.push_back(chosen);
        const auto& chosen_reach = reach.at(chosen);
        for (auto v : chosen_reach) {
            auto s = input_slot.at(v);
            reached[s] = true;
            in_pick[s] = true;
            pick_affinity[s] = affinity(chosen, v);
        }
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (picked[i]) continue;
            for (auto v : reach.at(candidates[i])) {
                auto s = input_slot.at(v);
                if (in_pick[s]) score[i] -= pick_affinity[s];
            }
        }
        for (auto v : chosen_reach) in_pick[input_slot.at(v)] = false;
    }

    nav.display_order = display_order(dag);
    nav.other_node = dag.next_id();
    std::vector<NodeId> uncovered;
    for (std::size_t s = 0; s < inputs.size(); ++s)
        if (!reached[s]) uncovered.push_back(inputs[s]);
    nav.display_order[nav.other_node] = ordered_children(dag, uncovered, reach);
    return nav;
}

}  // namespace hb

#include "hb/evalkit.hpp"

#include "hb/error.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <unordered_map>

namespace hb {

const StageAudit* PipelineTrace::find(const std::string& stage) const {
    for (const auto& s : stages)
        if (s.stage == stage) return &s;
    return nullptr;
}

SummaryStats SummaryStats::of(const std::vector<double>& values) {
    SummaryStats s;
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.variance = sq / static_cast<double>(values.size());
    return s;
}

DagMetrics graph_metrics(const ConceptDag& dag, const NavigationResult& nav) {
    DagMetrics m;
    m.node_count = dag.size();
    if (nav.entry_points.empty()) return m;

    std::unordered_map<NodeId, std::size_t> longest;
    auto order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::size_t best = 0;
        for (auto c : dag.children(*it)) best = std::max(best, longest[c] + 1);
        longest[*it] = best;
    }

    std::vector<double> leaves, depths;
    std::set<NodeId> shown;
    for (auto entry : nav.entry_points) {
        auto below = dag.descendants(entry);
        below.insert(entry);
        std::size_t leaf_count = 0;
        for (auto n : below) {
            if (dag.node(n).origin == Origin::input && dag.children(n).empty()) ++leaf_count;
            shown.insert(n);
        }
        leaves.push_back(static_cast<double>(leaf_count));
        depths.push_back(static_cast<double>(longest[entry]));
        m.max_depth = std::max(m.max_depth, longest[entry]);
    }
    std::vector<double> fanout;
    for (auto n : shown)
        if (!dag.children(n).empty()) fanout.push_back(static_cast<double>(dag.children(n).size()));

    m.leaves_per_entry = SummaryStats::of(leaves);
    m.depth_per_entry = SummaryStats::of(depths);
    m.children_per_internal = SummaryStats::of(fanout);
    return m;
}

std::set<NodeId> match_target(const ConceptDag& dag, std::string_view target, const Lexicon& lexicon,
                              const LemmaClassIndex& index) {
    std::set<NodeId> out;
    const auto bag = to_bag(target, lexicon, index);
    const auto text = normalize_text(target);
    if (text.empty()) return out;
    for (const auto& [id, node] : dag.nodes()) {
        if (node.origin == Origin::root) continue;
        bool hit = !bag.empty() && node.bag == bag;
        hit = hit || (node.label && normalize_text(*node.label) == text);
        hit = hit || std::any_of(node.members.begin(), node.members.end(),
                                 [&](const auto& mem) { return normalize_text(mem.text) == text; });
        if (hit) out.insert(id);
    }
    return out;
}

std::vector<RankedItem> rank_inputs(const ConceptDag& dag) {
    std::vector<RankedItem> out;
    for (const auto& [id, node] : dag.nodes())
        for (const auto& m : node.members)
            if (m.is_input) out.push_back({m.text, m.count});
    std::sort(out.begin(), out.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.text < b.text;
    });
    return out;
}

std::optional<std::size_t> flat_effort(const std::vector<RankedItem>& ranked, const std::set<std::string>& aliases) {
    std::set<std::string> wanted;
    for (const auto& a : aliases) wanted.insert(normalize_text(a));
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (wanted.contains(normalize_text(ranked[i].text))) return i + 1;
    return std::nullopt;
}

DagEffort dag_effort(const ConceptDag&, const NavigationResult& nav, const std::set<NodeId>& targets) {
    DagEffort result;
    if (targets.empty()) return result;

    auto children_of = [&](NodeId id) -> const std::vector<NodeId>& {
        static const std::vector<NodeId> kNone;
        auto it = nav.display_order.find(id);
        return it == nav.display_order.end() ? kNone : it->second;
    };

    using Item = std::pair<std::size_t, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::unordered_map<NodeId, std::size_t> cost;
    std::unordered_map<NodeId, NodeId> via;
    auto offer = [&](NodeId id, std::size_t c, std::optional<NodeId> from) {
        auto it = cost.find(id);
        if (it != cost.end() && it->second <= c) return;
        cost[id] = c;
        if (from) via[id] = *from;
        else via.erase(id);
        queue.emplace(c, id);
    };
    for (std::size_t i = 0; i < nav.entry_points.size(); ++i) offer(nav.entry_points[i], i + 1, std::nullopt);
    offer(nav.other_node, nav.entry_points.size() + 1, std::nullopt);

    while (!queue.empty()) {
        auto [c, id] = queue.top();
        queue.pop();
        if (cost[id] != c) continue;
        if (targets.contains(id)) {
            result.found = true;
            result.effort = c;
            for (NodeId cur = id;;) {
                result.path.push_back(cur);
                auto it = via.find(cur);
                if (it == via.end()) break;
                cur = it->second;
            }
            std::reverse(result.path.begin(), result.path.end());
            return result;
        }
        const auto& kids = children_of(id);
        for (std::size_t j = 0; j < kids.size(); ++j) offer(kids[j], c + 1 + (j + 1), id);
    }
    return result;
}

Coverage coverage(const ConceptDag& dag, const NavigationResult& nav, const std::vector<std::string>& targets,
                  const Lexicon& lexicon, const LemmaClassIndex& index) {
    std::set<NodeId> from_entries;
    for (auto e : nav.entry_points) {
        from_entries.insert(e);
        for (auto d : dag.descendants(e)) from_entries.insert(d);
    }
    Coverage c;
    for (const auto& t : targets) {
        auto matched = match_target(dag, t, lexicon, index);
        if (matched.empty()) continue;
        ++c.present;
        if (std::any_of(matched.begin(), matched.end(), [&](NodeId n) { return from_entries.contains(n); }))
            ++c.reachable;
    }
    return c;
}

EffortReport evaluate_targets(const ConceptDag& dag, const NavigationResult& nav,
                              const std::vector<std::string>& targets, const Lexicon& lexicon,
                              const LemmaClassIndex& index) {
    EffortReport report;
    report.coverage = coverage(dag, nav, targets, lexicon, index);
    const auto ranked = rank_inputs(dag);
    std::set<NodeId> from_entries;
    for (auto e : nav.entry_points) {
        from_entries.insert(e);
        for (auto d : dag.descendants(e)) from_entries.insert(d);
    }
    for (const auto& t : targets) {
        TargetEffort te;
        te.target = t;
        auto matched = match_target(dag, t, lexicon, index);
        std::set<std::string> aliases{t};
        for (auto n : matched)
            for (const auto& m : dag.node(n).members) aliases.insert(m.text);
        te.flat_effort = flat_effort(ranked, aliases);
        auto effort = dag_effort(dag, nav, matched);
        te.found = effort.found;
        if (effort.found) te.dag_effort = effort.effort;
        te.path = std::move(effort.path);
        te.reachable_from_entries =
            std::any_of(matched.begin(), matched.end(), [&](NodeId n) { return from_entries.contains(n); });
        report.targets.push_back(std::move(te));
    }
    return report;
}

std::vector<std::string> load_targets(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot read targets file " + file.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

std::vector<ComponentRow> component_report(const PipelineTrace& trace) {
    auto get = [&](const char* stage) -> const StageAudit* {
        const auto* s = trace.find(stage);
        return s && s->ran ? s : nullptr;
    };
    auto detail = [](const StageAudit* s, const char* key) -> std::size_t {
        if (!s) return 0;
        auto it = s->details.find(key);
        return it == s->details.end() ? 0 : it->second;
    };

    std::vector<ComponentRow> rows;
    const auto* expansion = get("expansion");
    const auto* build = get("build_dag");
    const auto* heads = get("heads");
    std::size_t derived = expansion ? detail(build, "derived_nodes") : 0;
    std::size_t reused = detail(heads, "head_nodes_reused");
    rows.push_back({"expanding the initial list", "add nodes", derived >= reused ? derived - reused : 0, 0});
    rows.push_back({"adding heads as nodes", "add nodes",
                    detail(heads, "head_nodes_created") + (expansion ? reused : 0), 0});

    const auto* semantic = get("semantic_merge");
    rows.push_back({"merging semantically equivalent nodes", "merge nodes", semantic ? semantic->nodes_merged : 0,
                    semantic ? semantic->nodes_before : 0});
    const auto* ontology = get("ontology_merge");
    rows.push_back({"ontology merging of synonym nodes", "merge nodes", ontology ? ontology->nodes_merged : 0,
                    ontology ? ontology->nodes_before : 0});
    const auto* taxonomy = get("taxonomy");
    rows.push_back({"taxonomic nodes", "add nodes", taxonomy ? taxonomy->nodes_added : 0, 0});
    rows.push_back({"taxonomic edges", "add edges", detail(taxonomy, "taxonomic_edges"), 0});
    const auto* prune = get("prune");
    rows.push_back({"dag pruning", "remove edges",
                    prune && prune->edges_before >= prune->edges_after ? prune->edges_before - prune->edges_after : 0,
                    0});
    return rows;
}

}  // namespace hb

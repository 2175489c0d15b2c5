#include "hb/reports.hpp"

#include "hb/error.hpp"

namespace hb {

using nlohmann::json;

namespace {

json stats_json(const SummaryStats& s) {
    return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"variance", s.variance}};
}

json optional_size(const std::optional<std::size_t>& v) { return v ? json(*v) : json(); }

}  // namespace

json metrics_to_json(const DagMetrics& m) {
    return {{"node_count", m.node_count},
            {"max_depth", m.max_depth},
            {"leaves_per_entry", stats_json(m.leaves_per_entry)},
            {"depth_per_entry", stats_json(m.depth_per_entry)},
            {"children_per_internal", stats_json(m.children_per_internal)}};
}

json effort_to_json(const EffortReport& report) {
    json targets = json::array();
    for (const auto& t : report.targets) {
        targets.push_back({{"target", t.target},
                           {"found", t.found},
                           {"flat_effort", optional_size(t.flat_effort)},
                           {"dag_effort", optional_size(t.dag_effort)},
                           {"reachable_from_entries", t.reachable_from_entries},
                           {"path", t.path}});
    }
    return {{"targets", std::move(targets)},
            {"coverage", {{"present", report.coverage.present}, {"reachable", report.coverage.reachable}}}};
}

json components_to_json(const std::vector<ComponentRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back(
            {{"component", r.component}, {"contribution", r.contribution}, {"count", r.count}, {"out_of", r.out_of}});
    return out;
}

json node_summary(const PipelineResult& result, NodeId id,
                  const std::unordered_map<NodeId, std::vector<NodeId>>& reach) {
    const auto& nav = result.navigation;
    auto kids = nav.display_order.find(id);
    const std::size_t child_count = kids == nav.display_order.end() ? 0 : kids->second.size();
    if (id == nav.other_node && !result.dag.contains(id)) {
        return {{"id", id},          {"representative", "other"}, {"origin", "other"}, {"aliases", json::array()},
                {"child_count", child_count}, {"parent_count", 0},     {"reachable_inputs", child_count}};
    }
    if (!result.dag.contains(id)) throw NotFound("unknown node " + std::to_string(id));
    const auto& node = result.dag.node(id);
    json aliases = json::array();
    for (const auto& m : node.members) aliases.push_back(m.text);
    auto r = reach.find(id);
    return {{"id", id},
            {"representative", representative_of(node)},
            {"origin", to_string(node.origin)},
            {"aliases", std::move(aliases)},
            {"child_count", child_count},
            {"parent_count", result.dag.parents(id).size()},
            {"reachable_inputs", r == reach.end() ? 0 : r->second.size()}};
}

}  // namespace hb

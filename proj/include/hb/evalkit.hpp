#pragma once
// Evaluation: DAG statistics, click effort (DAG vs flat list), coverage of a
// known-answer list and per-component contribution counts.

#include "hb/dag.hpp"
#include "hb/refine.hpp"
#include "hb/textnorm.hpp"
#include "hb/trace.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hb {

struct SummaryStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double variance = 0.0;  // population variance

    static SummaryStats of(const std::vector<double>& values);
};

struct DagMetrics {
    std::size_t node_count = 0;
    std::size_t max_depth = 0;
    SummaryStats leaves_per_entry;
    SummaryStats depth_per_entry;
    SummaryStats children_per_internal;
};

// Statistics over the part of the DAG reachable from the entry points.
// Leaves are input nodes without children; depth is the longest path.
DagMetrics graph_metrics(const ConceptDag& dag, const NavigationResult& nav);

// Nodes whose bag equals to_bag(target) (non-empty), or with a member or
// label equal to the target after normalization.
std::set<NodeId> match_target(const ConceptDag& dag, std::string_view target, const Lexicon& lexicon,
                              const LemmaClassIndex& index);

struct RankedItem {
    std::string text;
    std::uint64_t count = 0;
};

// Input member strings by descending count, then text.
std::vector<RankedItem> rank_inputs(const ConceptDag& dag);

// 1-based position of the first ranked string whose normal form is in
// `aliases` (normalized), or nullopt.
std::optional<std::size_t> flat_effort(const std::vector<RankedItem>& ranked, const std::set<std::string>& aliases);

struct DagEffort {
    bool found = false;
    std::size_t effort = 0;
    std::vector<NodeId> path;  // entry point (or other_node) down to the target
};

// Cheapest path to any of `targets`: the 1-based position of each node in
// the list visible at its level, plus one click per expansion. The top
// level lists the entry points followed by other_node.
DagEffort dag_effort(const ConceptDag& dag, const NavigationResult& nav, const std::set<NodeId>& targets);

struct Coverage {
    std::size_t present = 0;    // targets matched anywhere
    std::size_t reachable = 0;  // of those, reachable from an entry point

    bool operator==(const Coverage&) const = default;
};

Coverage coverage(const ConceptDag& dag, const NavigationResult& nav, const std::vector<std::string>& targets,
                  const Lexicon& lexicon, const LemmaClassIndex& index);

struct TargetEffort {
    std::string target;
    bool found = false;
    std::optional<std::size_t> flat_effort;
    std::optional<std::size_t> dag_effort;
    bool reachable_from_entries = false;
    std::vector<NodeId> path;
};

struct EffortReport {
    std::vector<TargetEffort> targets;
    Coverage coverage;
};

EffortReport evaluate_targets(const ConceptDag& dag, const NavigationResult& nav,
                              const std::vector<std::string>& targets, const Lexicon& lexicon,
                              const LemmaClassIndex& index);

// One target per line, blank lines and '#' comments skipped.
std::vector<std::string> load_targets(const std::filesystem::path& file);

struct ComponentRow {
    std::string component;
    std::string contribution;  // "add nodes", "merge nodes", "add edges", "remove edges"
    std::size_t count = 0;
    std::size_t out_of = 0;    // nodes before the stage for merge rows, else 0

    bool operator==(const ComponentRow&) const = default;
};

std::vector<ComponentRow> component_report(const PipelineTrace& trace);

}  // namespace hb

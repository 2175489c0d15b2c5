#pragma once
// Per-stage audit records written by the pipeline and read by evalkit.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace hb {

struct StageAudit {
    std::string stage;
    bool ran = false;
    std::size_t nodes_before = 0;
    std::size_t nodes_after = 0;
    std::size_t edges_before = 0;
    std::size_t edges_after = 0;
    std::size_t nodes_added = 0;
    std::size_t nodes_merged = 0;
    std::size_t nodes_removed = 0;
    std::size_t edges_added = 0;
    std::size_t edges_removed = 0;
    // Input member strings across all nodes after the stage.
    std::size_t input_strings = 0;
    bool acyclic = true;
    // Stage-specific counters, e.g. "derived_nodes", "sibling_merges".
    std::map<std::string, std::size_t> details;

    bool operator==(const StageAudit&) const = default;
};

struct PipelineTrace {
    std::vector<StageAudit> stages;

    const StageAudit* find(const std::string& stage) const;
    bool operator==(const PipelineTrace&) const = default;
};

}  // namespace hb

#pragma once
// JSON views shared by the CLI and the service.

#include "hb/evalkit.hpp"
#include "hb/pipeline.hpp"

#include <json.hpp>

namespace hb {

nlohmann::json metrics_to_json(const DagMetrics& metrics);
nlohmann::json effort_to_json(const EffortReport& report);
nlohmann::json components_to_json(const std::vector<ComponentRow>& rows);

// Compact description of one node as shown in listings. Handles other_node.
nlohmann::json node_summary(const PipelineResult& result, NodeId id,
                            const std::unordered_map<NodeId, std::vector<NodeId>>& reach);

}  // namespace hb

#pragma once
// DAG artifact file: nodes, edges, navigation, config echo and stage trace as
// one JSON document with sorted keys.

#include "hb/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace hb {

inline constexpr int kDagFormatVersion = 1;
inline constexpr const char* kDagFormatName = "hb-dag";

nlohmann::json dag_to_json(const ConceptDag& dag);
nlohmann::json navigation_to_json(const NavigationResult& nav);
nlohmann::json trace_to_json(const PipelineTrace& trace);
nlohmann::json node_to_json(const ConceptNode& node);

std::string serialize_result(const PipelineResult& result);
// Throws ParseError on malformed input and UnsupportedVersion on a version
// other than kDagFormatVersion. Nothing partial is returned.
PipelineResult load_result(std::string_view text);

void save_result(const PipelineResult& result, const std::filesystem::path& file);
PipelineResult load_result_file(const std::filesystem::path& file);

}  // namespace hb

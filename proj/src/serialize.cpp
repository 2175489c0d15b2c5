#include "hb/serialize.hpp"

#include "hb/error.hpp"

#include <fstream>
#include <sstream>

namespace hb {

using nlohmann::json;

json node_to_json(const ConceptNode& node) {
    json j;
    j["id"] = node.id;
    j["origin"] = to_string(node.origin);
    j["bag"] = node.bag.classes();
    json members = json::array();
    for (const auto& m : node.members) members.push_back({{"text", m.text}, {"count", m.count}, {"is_input", m.is_input}});
    j["members"] = std::move(members);
    j["representative"] = node.representative ? json(*node.representative) : json();
    j["concept"] = node.concept_id ? json(*node.concept_id) : json();
    j["label"] = node.label ? json(*node.label) : json();
    return j;
}

json dag_to_json(const ConceptDag& dag) {
    json j;
    json nodes = json::array();
    for (const auto& [id, node] : dag.nodes()) nodes.push_back(node_to_json(node));
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& [p, c] : dag.edges()) edges.push_back({p, c});
    j["edges"] = std::move(edges);
    j["root"] = dag.root() ? json(*dag.root()) : json();
    j["next_id"] = dag.next_id();
    return j;
}

json navigation_to_json(const NavigationResult& nav) {
    json order = json::array();
    for (const auto& [id, kids] : nav.display_order) order.push_back({id, kids});
    return {{"entry_points", nav.entry_points}, {"other_node", nav.other_node}, {"display_order", std::move(order)}};
}

json trace_to_json(const PipelineTrace& trace) {
    json out = json::array();
    for (const auto& s : trace.stages) {
        out.push_back({{"stage", s.stage},
                       {"ran", s.ran},
                       {"nodes_before", s.nodes_before},
                       {"nodes_after", s.nodes_after},
                       {"edges_before", s.edges_before},
                       {"edges_after", s.edges_after},
                       {"nodes_added", s.nodes_added},
                       {"nodes_merged", s.nodes_merged},
                       {"nodes_removed", s.nodes_removed},
                       {"edges_added", s.edges_added},
                       {"edges_removed", s.edges_removed},
                       {"input_strings", s.input_strings},
                       {"acyclic", s.acyclic},
                       {"details", s.details}});
    }
    return out;
}

std::string serialize_result(const PipelineResult& result) {
    json j = dag_to_json(result.dag);
    j["format"] = kDagFormatName;
    j["version"] = kDagFormatVersion;
    j["config"] = config_to_json(result.config);
    j["navigation"] = navigation_to_json(result.navigation);
    j["trace"] = trace_to_json(result.trace);
    j["classes"] = result.classes.mapping();
    return j.dump(1) + "\n";
}

namespace {

std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

PipelineResult from_json(const json& j) {
    PipelineResult r;
    r.config = config_from_json(j.at("config"));

    for (const auto& n : j.at("nodes")) {
        ConceptNode node;
        node.id = n.at("id").get<NodeId>();
        node.origin = origin_from_string(n.at("origin").get<std::string>());
        node.bag = LemmaBag(n.at("bag").get<std::vector<std::string>>());
        for (const auto& m : n.at("members"))
            node.members.push_back(
                {m.at("text").get<std::string>(), m.at("count").get<std::uint64_t>(), m.at("is_input").get<bool>()});
        node.representative = opt_string(n, "representative");
        node.concept_id = opt_string(n, "concept");
        node.label = opt_string(n, "label");
        r.dag.insert_with_id(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ParseError("edge must be a [parent, child] pair");
        auto p = e[0].get<NodeId>(), c = e[1].get<NodeId>();
        if (!r.dag.contains(p) || !r.dag.contains(c)) throw ParseError("edge refers to an unknown node");
        if (!r.dag.add_edge(p, c)) throw ParseError("duplicate edge");
    }
    if (!j.at("root").is_null()) r.dag.set_root(j["root"].get<NodeId>());
    const auto next = j.at("next_id").get<NodeId>();
    if (next < r.dag.next_id()) throw ParseError("next_id below a node id");
    r.dag.set_next_id(next);
    if (!r.dag.is_acyclic()) throw ParseError("edges contain a cycle");

    const auto& nav = j.at("navigation");
    r.navigation.entry_points = nav.at("entry_points").get<std::vector<NodeId>>();
    r.navigation.other_node = nav.at("other_node").get<NodeId>();
    for (const auto& row : nav.at("display_order")) {
        if (!row.is_array() || row.size() != 2) throw ParseError("display_order row must be [id, children]");
        r.navigation.display_order[row[0].get<NodeId>()] = row[1].get<std::vector<NodeId>>();
    }

    for (const auto& s : j.at("trace")) {
        StageAudit a;
        a.stage = s.at("stage").get<std::string>();
        a.ran = s.at("ran").get<bool>();
        a.nodes_before = s.at("nodes_before").get<std::size_t>();
        a.nodes_after = s.at("nodes_after").get<std::size_t>();
        a.edges_before = s.at("edges_before").get<std::size_t>();
        a.edges_after = s.at("edges_after").get<std::size_t>();
        a.nodes_added = s.at("nodes_added").get<std::size_t>();
        a.nodes_merged = s.at("nodes_merged").get<std::size_t>();
        a.nodes_removed = s.at("nodes_removed").get<std::size_t>();
        a.edges_added = s.at("edges_added").get<std::size_t>();
        a.edges_removed = s.at("edges_removed").get<std::size_t>();
        a.input_strings = s.at("input_strings").get<std::size_t>();
        a.acyclic = s.at("acyclic").get<bool>();
        a.details = s.at("details").get<std::map<std::string, std::size_t>>();
        r.trace.stages.push_back(std::move(a));
    }
    r.classes = LemmaClassIndex(j.at("classes").get<std::map<std::string, std::string>>());
    return r;
}

}  // namespace

PipelineResult load_result(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed DAG file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("DAG file must hold an object");
    if (!j.contains("format") || j["format"] != kDagFormatName) throw ParseError("not a DAG file");
    if (!j.contains("version")) throw ParseError("DAG file has no version");
    const auto& v = j["version"];
    std::string version = v.is_string() ? v.get<std::string>() : v.dump();
    if (version != std::to_string(kDagFormatVersion))
        throw UnsupportedVersion("unsupported DAG format version " + version);
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed DAG file: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("malformed DAG file: ") + e.what());
    }
}

void save_result(const PipelineResult& result, const std::filesystem::path& file) {
    auto text = serialize_result(result);
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write " + tmp.string());
        out << text;
        if (!out) throw ResourceError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

PipelineResult load_result_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ResourceError("cannot read DAG file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_result(ss.str());
}

}  // namespace hb

#include "hb/pipeline.hpp"

#include "hb/digest.hpp"
#include "hb/error.hpp"
#include "hb/grouping.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hb {

using nlohmann::json;

namespace {

TokenAnnotation parse_token(const json& t) {
    if (!t.is_object()) throw ParseError("token must be an object");
    TokenAnnotation tok;
    if (!t.contains("form") || !t["form"].is_string()) throw ParseError("token needs a string \"form\"");
    tok.form = t["form"].get<std::string>();
    if (t.contains("lemma") && !t["lemma"].is_null()) tok.lemma = t["lemma"].get<std::string>();
    if (t.contains("pos") && !t["pos"].is_null()) tok.pos = t["pos"].get<std::string>();
    if (!t.contains("head") || !t["head"].is_number_integer()) throw ParseError("token needs an integer \"head\"");
    tok.head = t["head"].get<int>();
    return tok;
}

AnnotatedSpan parse_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("record must be an object");
    if (!j.contains("text") || !j["text"].is_string()) throw ParseError("record needs a string \"text\"");
    AnnotatedSpan span;
    span.text = j["text"].get<std::string>();
    if (j.contains("count")) {
        const auto& c = j["count"];
        if (!c.is_number_integer() || c.get<std::int64_t>() < 1) throw ParseError("\"count\" must be an integer >= 1");
        span.count = c.get<std::uint64_t>();
    }
    if (j.contains("tokens") && !j["tokens"].is_null()) {
        if (!j["tokens"].is_array()) throw ParseError("\"tokens\" must be an array");
        std::vector<TokenAnnotation> toks;
        try {
            for (const auto& t : j["tokens"]) toks.push_back(parse_token(t));
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad token: ") + e.what());
        }
        span.tokens = std::move(toks);
    }
    return span;
}

// Folds spans sharing a normal form into the first occurrence.
std::vector<AnnotatedSpan> fold(const std::vector<AnnotatedSpan>& spans) {
    std::vector<AnnotatedSpan> out;
    std::map<std::string, std::size_t> at;
    for (const auto& s : spans) {
        auto key = normalize_text(s.text);
        auto [it, inserted] = at.emplace(key, out.size());
        if (inserted) out.push_back(s);
        else out[it->second].count += s.count;
    }
    return out;
}

std::size_t input_strings(const ConceptDag& dag) {
    std::size_t n = 0;
    for (const auto& [id, node] : dag.nodes()) n += node.input_member_count();
    return n;
}

struct Snapshot {
    std::set<NodeId> nodes;
    std::set<std::pair<NodeId, NodeId>> edges;
    std::size_t merges = 0;
    std::size_t inputs = 0;
};

Snapshot snapshot(const ConceptDag& dag) {
    Snapshot s;
    for (const auto& [id, node] : dag.nodes()) s.nodes.insert(id);
    for (const auto& e : dag.edges()) s.edges.insert(e);
    s.merges = dag.merges_performed();
    s.inputs = input_strings(dag);
    return s;
}

template <class Set>
std::size_t count_missing(const Set& from, const Set& in) {
    std::size_t n = 0;
    for (const auto& x : from) n += in.contains(x) ? 0 : 1;
    return n;
}

StageAudit diff(const std::string& stage, const Snapshot& before, const ConceptDag& dag) {
    auto after = snapshot(dag);
    StageAudit a;
    a.stage = stage;
    a.ran = true;
    a.nodes_before = before.nodes.size();
    a.nodes_after = after.nodes.size();
    a.edges_before = before.edges.size();
    a.edges_after = after.edges.size();
    a.nodes_added = count_missing(after.nodes, before.nodes);
    a.nodes_merged = after.merges - before.merges;
    const auto gone = count_missing(before.nodes, after.nodes);
    a.nodes_removed = gone >= a.nodes_merged ? gone - a.nodes_merged : 0;
    a.edges_added = count_missing(after.edges, before.edges);
    a.edges_removed = count_missing(before.edges, after.edges);
    a.input_strings = after.inputs;
    a.acyclic = dag.is_acyclic();
    return a;
}

void check_invariants(const std::string& stage, const ConceptDag& dag, const StageAudit& audit) {
    if (!audit.acyclic) throw InvariantError("cycle after stage " + stage);
    if (!dag.root()) return;
    auto alive = dag.reachable_from_root();
    if (alive.size() != dag.size()) throw InvariantError("unreachable nodes after stage " + stage);
}

}  // namespace

std::vector<AnnotatedSpan> parse_input(std::istream& in, InputFormat format) {
    std::vector<AnnotatedSpan> spans;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (normalize_text(line).empty()) continue;
        if (format == InputFormat::text) {
            spans.push_back({line, std::nullopt, 1, true});
            continue;
        }
        try {
            auto span = parse_record(line);
            if (normalize_text(span.text).empty()) throw ParseError("empty \"text\"");
            if (span.tokens) validate_annotations(span);
            spans.push_back(std::move(span));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        } catch (const AnnotationError& e) {
            throw AnnotationError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
        }
    }
    return fold(spans);
}

std::vector<AnnotatedSpan> parse_input(const std::filesystem::path& file, InputFormat format) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ResourceError("cannot read input file " + file.string());
    if (format == InputFormat::automatic) format = file.extension() == ".txt" ? InputFormat::text : InputFormat::jsonl;
    return parse_input(in, format);
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSpec& spec) {
    switch (spec.kind) {
        case ProviderKind::trigram:
            return std::make_unique<TrigramProvider>(spec.trigram_dimension);
        case ProviderKind::vectors:
            return std::make_unique<VectorsFileProvider>(spec.location);
        case ProviderKind::remote:
            return std::make_unique<RemoteEmbeddingProvider>(spec.location);
    }
    throw ArgumentError("unknown provider kind");
}

void PipelineConfig::validate() const {
    merge.validate();
    entry.validate();
    taxonomy.validate();
    if (provider.kind == ProviderKind::trigram && provider.trigram_dimension == 0)
        throw ArgumentError("trigram dimension must be positive");
    if (provider.kind != ProviderKind::trigram && provider.location.empty())
        throw ArgumentError("provider needs a location");
}

namespace {

std::string_view kind_name(ProviderKind k) {
    switch (k) {
        case ProviderKind::trigram: return "trigram";
        case ProviderKind::vectors: return "vectors";
        case ProviderKind::remote: return "remote";
    }
    return "trigram";
}

ProviderKind kind_from(const std::string& s) {
    if (s == "trigram") return ProviderKind::trigram;
    if (s == "vectors") return ProviderKind::vectors;
    if (s == "remote") return ProviderKind::remote;
    throw ArgumentError("unknown provider kind \"" + s + "\"");
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json config_to_json(const PipelineConfig& c) {
    json j;
    j["merge"] = {{"t1", c.merge.t1}, {"t2", c.merge.t2}};
    j["entry"] = {{"k", c.entry.k}, {"affinity_floor", c.entry.affinity_floor}};
    j["taxonomy"] = {{"max_ancestor_depth", c.taxonomy.max_ancestor_depth},
                     {"min_governed", c.taxonomy.min_governed}};
    j["provider"] = {{"kind", kind_name(c.provider.kind)},
                     {"location", c.provider.location},
                     {"trigram_dimension", c.provider.trigram_dimension}};
    j["stages"] = {{"expansion", c.stages.expansion},           {"heads", c.stages.heads},
                   {"semantic_merge", c.stages.semantic_merge}, {"ontology_merge", c.stages.ontology_merge},
                   {"taxonomy", c.stages.taxonomy},             {"pruning", c.stages.pruning}};
    j["validate_stages"] = c.validate_stages;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    try {
        if (!j.is_object()) throw ArgumentError("config must be an object");
        if (j.contains("merge")) {
            read_opt(j["merge"], "t1", c.merge.t1);
            read_opt(j["merge"], "t2", c.merge.t2);
        }
        if (j.contains("entry")) {
            read_opt(j["entry"], "k", c.entry.k);
            read_opt(j["entry"], "affinity_floor", c.entry.affinity_floor);
        }
        if (j.contains("taxonomy")) {
            read_opt(j["taxonomy"], "max_ancestor_depth", c.taxonomy.max_ancestor_depth);
            read_opt(j["taxonomy"], "min_governed", c.taxonomy.min_governed);
        }
        if (j.contains("provider")) {
            const auto& p = j["provider"];
            if (p.contains("kind")) c.provider.kind = kind_from(p["kind"].get<std::string>());
            read_opt(p, "location", c.provider.location);
            read_opt(p, "trigram_dimension", c.provider.trigram_dimension);
        }
        if (j.contains("stages")) {
            const auto& s = j["stages"];
            read_opt(s, "expansion", c.stages.expansion);
            read_opt(s, "heads", c.stages.heads);
            read_opt(s, "semantic_merge", c.stages.semantic_merge);
            read_opt(s, "ontology_merge", c.stages.ontology_merge);
            read_opt(s, "taxonomy", c.stages.taxonomy);
            read_opt(s, "pruning", c.stages.pruning);
        }
        read_opt(j, "validate_stages", c.validate_stages);
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
}

Resources load_resources(const std::filesystem::path& lexicon_dir, const std::filesystem::path& ontology_file) {
    Resources r;
    std::string fp;
    if (!lexicon_dir.empty()) {
        if (!std::filesystem::is_directory(lexicon_dir))
            throw ResourceError("lexicon directory not found: " + lexicon_dir.string());
        r.lexicon = load_lexicon(lexicon_dir);
        for (const char* name : {"stopwords.txt", "modals.txt", "quantities.txt", "lemmas.tsv", "synonyms.tsv"}) {
            auto p = lexicon_dir / name;
            if (std::filesystem::exists(p)) fp += std::string(name) + ":" + sha256_file(p) + "\n";
        }
    }
    if (!ontology_file.empty()) {
        r.ontology = load_ontology(ontology_file);
        fp += "ontology:" + sha256_file(ontology_file) + "\n";
    }
    r.fingerprint = sha256_hex(fp);
    return r;
}

PipelineResult run_pipeline(const std::vector<AnnotatedSpan>& spans, const Resources& resources,
                            const PipelineConfig& config, EmbeddingProvider& provider) {
    config.validate();
    const auto& lexicon = resources.lexicon;
    EmbeddingCache cache(provider);
    PipelineResult result;
    result.config = config;
    auto& dag = result.dag;
    auto& trace = result.trace;

    // Runs `body` as a named stage with audit and invariant checks.
    auto stage = [&](const std::string& name, bool enabled, const std::function<void(StageAudit&)>& body) {
        if (!enabled) {
            StageAudit skipped;
            skipped.stage = name;
            skipped.nodes_before = skipped.nodes_after = dag.size();
            skipped.edges_before = skipped.edges_after = dag.edge_count();
            skipped.input_strings = input_strings(dag);
            trace.stages.push_back(std::move(skipped));
            return;
        }
        try {
            auto before = snapshot(dag);
            StageAudit extra;
            body(extra);
            auto audit = diff(name, before, dag);
            audit.details = std::move(extra.details);
            if (config.validate_stages) check_invariants(name, dag, audit);
            trace.stages.push_back(std::move(audit));
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(name, std::current_exception(), e.what());
        }
    };

    const auto inputs = fold(spans);
    std::vector<AnnotatedSpan> expanded;
    stage("expansion", config.stages.expansion, [&](StageAudit& a) {
        expanded = inputs.empty() ? inputs : expand_all(inputs, lexicon);
        a.details["spans_in"] = inputs.size();
        a.details["spans_out"] = expanded.size();
    });
    if (!config.stages.expansion) expanded = inputs;

    std::vector<EquivalenceSet> sets;
    stage("group", true, [&](StageAudit& a) {
        result.classes = build_class_index(lemma_vocabulary(expanded, lexicon), lexicon);
        sets = group(expanded, lexicon, result.classes);
        a.details["sets"] = sets.size();
    });

    stage("build_dag", true, [&](StageAudit& a) {
        dag = build_dag(sets);
        std::size_t derived = 0;
        for (const auto& [id, node] : dag.nodes()) derived += node.has_input() ? 0 : 1;
        a.details["derived_nodes"] = derived;
    });

    stage("heads", config.stages.heads, [&](StageAudit& a) {
        std::set<NodeId> substrings;
        for (const auto& [id, node] : dag.nodes())
            if (node.origin == Origin::substring) substrings.insert(id);
        const NodeId first_new = dag.next_id();
        add_head_roots(dag, inputs, lexicon, result.classes);
        std::size_t created = 0, reused = 0;
        for (const auto& [id, node] : dag.nodes()) {
            if (node.origin != Origin::head) continue;
            if (id >= first_new) ++created;
            else if (substrings.contains(id)) ++reused;
        }
        a.details["head_nodes_created"] = created;
        a.details["head_nodes_reused"] = reused;
    });
    if (!dag.root()) {
        attach_root(dag);
        dag.node(*dag.root()).representative = "root";
    }

    stage("semantic_merge", config.stages.semantic_merge, [&](StageAudit& a) {
        auto s = merge_semantic(dag, cache, config.merge);
        a.details["sibling_merges"] = s.sibling_merges;
        a.details["parent_child_merges"] = s.parent_child_merges;
    });

    stage("ontology_merge", config.stages.ontology_merge && !resources.ontology.empty(), [&](StageAudit&) {
        merge_ontology_synonyms(dag, resources.ontology);
        attach_root(dag);
    });

    stage("taxonomy", config.stages.taxonomy && !resources.ontology.empty(), [&](StageAudit& a) {
        auto links = link_nodes(dag, resources.ontology);
        auto s = add_taxonomic_nodes(dag, resources.ontology, links, cache, config.taxonomy);
        a.details["linked_nodes"] = links.size();
        a.details["taxonomic_edges"] = s.edges_added;
    });

    stage("prune", config.stages.pruning, [&](StageAudit&) { prune_children(dag); });
    stage("collapse", config.stages.pruning, [&](StageAudit&) { collapse_single_child(dag); });

    stage("entry_points", true, [&](StageAudit& a) {
        assign_representatives(dag);
        result.navigation = select_entry_points(dag, cache, config.entry);
        a.details["entry_points"] = result.navigation.entry_points.size();
        a.details["other_children"] = result.navigation.other_children().size();
    });
    return result;
}

PipelineResult run_pipeline(const std::vector<AnnotatedSpan>& spans, const Resources& resources,
                            const PipelineConfig& config) {
    config.validate();
    auto provider = make_provider(config.provider);
    return run_pipeline(spans, resources, config, *provider);
}

}  // namespace hb

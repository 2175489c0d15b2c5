// hbuild: build, serve and evaluate concept hierarchies.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 provider/resource error.

#include "hb/error.hpp"
#include "hb/evalkit.hpp"
#include "hb/pipeline.hpp"
#include "hb/reports.hpp"
#include "hb/serialize.hpp"
#include "hb/service.hpp"
#include "hb/store.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kResource = 3;

int exit_code_for(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const hb::PipelineError& e) {
        return e.cause() ? exit_code_for(e.cause()) : kData;
    } catch (const hb::ArgumentError&) {
        return kUsage;
    } catch (const hb::ResourceError&) {
        return kResource;
    } catch (const hb::ProviderError&) {
        return kResource;
    } catch (const hb::Error&) {
        return kData;
    } catch (const std::filesystem::filesystem_error&) {
        return kResource;
    } catch (...) {
        return kData;
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw hb::ResourceError("cannot write " + path);
    out << text;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw hb::ArgumentError("--listen expects HOST:PORT");
    try {
        return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw hb::ArgumentError("--listen expects HOST:PORT");
    }
}

hb::Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Builds navigable concept hierarchies from extracted strings"};
    app.require_subcommand(1);

    hb::PipelineConfig config;
    std::string input, format = "auto", resources_dir, ontology_file, out_path, provider = "trigram", vectors,
                embed_url, config_file;
    bool no_expansion = false, no_heads = false, no_semantic = false, no_ontology = false, no_taxonomy = false,
         no_pruning = false;

    auto* build = app.add_subcommand("build", "Run the pipeline and write a DAG file");
    build->add_option("--input", input, "Input strings (JSONL records or .txt lines)")->required();
    build->add_option("--format", format, "auto, jsonl or text")->check(CLI::IsMember({"auto", "jsonl", "text"}));
    build->add_option("--resources", resources_dir, "Lexicon directory");
    build->add_option("--ontology", ontology_file, "Ontology subset (JSONL)");
    build->add_option("--config", config_file, "Pipeline config JSON (flags override it)");
    auto* provider_opt =
        build->add_option("--provider", provider, "Embedding provider")->check(CLI::IsMember({"trigram"}));
    auto* vectors_opt = build->add_option("--vectors", vectors, "Precomputed vectors file");
    auto* url_opt = build->add_option("--embed-url", embed_url, "Remote embedding endpoint");
    vectors_opt->excludes(url_opt)->excludes(provider_opt);
    url_opt->excludes(provider_opt);
    auto* k_opt = build->add_option("--k", config.entry.k, "Number of entry points");
    auto* t1_opt = build->add_option("--t1", config.merge.t1, "Sibling merge threshold");
    auto* t2_opt = build->add_option("--t2", config.merge.t2, "Parent-child merge threshold");
    auto* floor_opt = build->add_option("--affinity-floor", config.entry.affinity_floor, "Entry-point affinity floor");
    auto* depth_opt = build->add_option("--max-ancestor-depth", config.taxonomy.max_ancestor_depth);
    auto* governed_opt = build->add_option("--min-governed", config.taxonomy.min_governed);
    build->add_flag("--no-expansion", no_expansion);
    build->add_flag("--no-heads", no_heads);
    build->add_flag("--no-semantic-merge", no_semantic);
    build->add_flag("--no-ontology-merge", no_ontology);
    build->add_flag("--no-taxonomy", no_taxonomy);
    build->add_flag("--no-pruning", no_pruning);
    build->add_option("--out", out_path, "DAG output file")->required();

    std::string store_dir, listen = "127.0.0.1:8080";
    auto* serve = app.add_subcommand("serve", "Serve datasets over HTTP");
    serve->add_option("--store", store_dir, "Dataset store directory")->required();
    serve->add_option("--listen", listen, "HOST:PORT");
    serve->add_option("--resources", resources_dir, "Lexicon directory");
    serve->add_option("--ontology", ontology_file, "Ontology subset (JSONL)");

    std::string dag_path, targets_path;
    auto* eval = app.add_subcommand("eval", "Effort and coverage for a target list");
    eval->add_option("--dag", dag_path)->required();
    eval->add_option("--targets", targets_path)->required();
    eval->add_option("--resources", resources_dir, "Lexicon directory used for the build");
    eval->add_option("--out", out_path, "Report file (default stdout)");

    auto* metrics = app.add_subcommand("metrics", "Graph statistics of a DAG file");
    metrics->add_option("--dag", dag_path)->required();

    auto* report = app.add_subcommand("report", "Per-component contribution trace");
    report->add_option("--dag", dag_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*build) {
            if (!config_file.empty()) {
                std::ifstream in(config_file);
                if (!in) throw hb::ResourceError("cannot read config " + config_file);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw hb::ArgumentError(std::string("bad config file: ") + e.what());
                }
                auto base = hb::config_from_json(j);
                // Flags given on the command line win over the file.
                if (!*k_opt) config.entry.k = base.entry.k;
                if (!*t1_opt) config.merge.t1 = base.merge.t1;
                if (!*t2_opt) config.merge.t2 = base.merge.t2;
                if (!*floor_opt) config.entry.affinity_floor = base.entry.affinity_floor;
                if (!*depth_opt) config.taxonomy.max_ancestor_depth = base.taxonomy.max_ancestor_depth;
                if (!*governed_opt) config.taxonomy.min_governed = base.taxonomy.min_governed;
                config.provider = base.provider;
                config.stages = base.stages;
            }
            if (!vectors.empty()) config.provider = {hb::ProviderKind::vectors, vectors, 0};
            else if (!embed_url.empty()) config.provider = {hb::ProviderKind::remote, embed_url, 0};
            else if (*provider_opt) config.provider = {};
            if (no_expansion) config.stages.expansion = false;
            if (no_heads) config.stages.heads = false;
            if (no_semantic) config.stages.semantic_merge = false;
            if (no_ontology) config.stages.ontology_merge = false;
            if (no_taxonomy) config.stages.taxonomy = false;
            if (no_pruning) config.stages.pruning = false;
            config.validate();

            auto fmt = format == "jsonl" ? hb::InputFormat::jsonl
                       : format == "text" ? hb::InputFormat::text
                                          : hb::InputFormat::automatic;
            auto resources = hb::load_resources(resources_dir, ontology_file);
            auto spans = hb::parse_input(input, fmt);
            auto result = hb::run_pipeline(spans, resources, config);
            hb::save_result(result, out_path);
            std::cout << "built " << result.dag.size() << " nodes, " << result.dag.edge_count() << " edges, "
                      << result.navigation.entry_points.size() << " entry points -> " << out_path << "\n";
        } else if (*serve) {
            auto [host, port] = split_listen(listen);
            hb::DatasetStore store(store_dir, hb::load_resources(resources_dir, ontology_file));
            hb::Service service(store);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            service.run(host, port);
            g_service = nullptr;
        } else if (*eval) {
            auto result = hb::load_result_file(dag_path);
            auto resources = hb::load_resources(resources_dir, {});
            auto targets = hb::load_targets(targets_path);
            auto rep = hb::evaluate_targets(result.dag, result.navigation, targets, resources.lexicon, result.classes);
            write_output(out_path, hb::effort_to_json(rep).dump(2) + "\n");
        } else if (*metrics) {
            auto result = hb::load_result_file(dag_path);
            std::cout << hb::metrics_to_json(hb::graph_metrics(result.dag, result.navigation)).dump(2) << "\n";
        } else if (*report) {
            auto result = hb::load_result_file(dag_path);
            nlohmann::json out = {{"components", hb::components_to_json(hb::component_report(result.trace))},
                                  {"stages", hb::trace_to_json(result.trace)}};
            std::cout << out.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(std::current_exception());
    }
    return 0;
}

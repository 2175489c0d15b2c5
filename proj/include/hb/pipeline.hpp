#pragma once
// Input records, pipeline configuration and orchestration.

#include "hb/dag.hpp"
#include "hb/embedding.hpp"
#include "hb/error.hpp"
#include "hb/expansion.hpp"
#include "hb/ontology.hpp"
#include "hb/refine.hpp"
#include "hb/semantic_merge.hpp"
#include "hb/taxonomy.hpp"
#include "hb/textnorm.hpp"
#include "hb/trace.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace hb {

enum class InputFormat { automatic, jsonl, text };

// JSONL records {"text": ..., "count"?: int >= 1, "tokens"?: [{"form",
// "lemma"?, "pos"?, "head"}]}, or plain text with one string per line.
// Automatic picks text for *.txt files and JSONL otherwise. Duplicate texts
// (by normal form) fold their counts into the first occurrence.
std::vector<AnnotatedSpan> parse_input(std::istream& in, InputFormat format);
std::vector<AnnotatedSpan> parse_input(const std::filesystem::path& file, InputFormat format = InputFormat::automatic);

enum class ProviderKind { trigram, vectors, remote };

struct ProviderSpec {
    ProviderKind kind = ProviderKind::trigram;
    std::string location;  // vectors file path or embedding URL
    std::size_t trigram_dimension = 4096;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSpec& spec);

struct StageToggles {
    bool expansion = true;
    bool heads = true;
    bool semantic_merge = true;
    bool ontology_merge = true;
    bool taxonomy = true;
    bool pruning = true;
};

struct PipelineConfig {
    MergeConfig merge;
    EntryPointConfig entry;
    TaxonomyConfig taxonomy;
    ProviderSpec provider;
    StageToggles stages;
    // Check acyclicity and root reachability after every stage.
    bool validate_stages = true;

    void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

struct Resources {
    Lexicon lexicon;
    Ontology ontology;
    // Digest of the resource files, part of the dataset identity.
    std::string fingerprint;
};

// Either path may be empty: no lexicon files / no ontology.
Resources load_resources(const std::filesystem::path& lexicon_dir, const std::filesystem::path& ontology_file);

struct PipelineResult {
    ConceptDag dag;
    NavigationResult navigation;
    PipelineTrace trace;
    LemmaClassIndex classes;
    PipelineConfig config;
};

// A stage failed; `cause` holds the original exception.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, std::exception_ptr cause, const std::string& message)
        : Error("stage " + stage + " failed: " + message), stage_(std::move(stage)), cause_(std::move(cause)) {}
    const std::string& stage() const { return stage_; }
    std::exception_ptr cause() const { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

PipelineResult run_pipeline(const std::vector<AnnotatedSpan>& spans, const Resources& resources,
                            const PipelineConfig& config, EmbeddingProvider& provider);

// Convenience: builds the provider from config.provider.
PipelineResult run_pipeline(const std::vector<AnnotatedSpan>& spans, const Resources& resources,
                            const PipelineConfig& config);

}  // namespace hb

#pragma once
// Embedding providers. The pipeline only needs embed(texts) -> vectors of a
// fixed dimension; which model produces them is a deployment choice.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hb {

using Embedding = std::vector<float>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // One vector per text, same order, all of dimension(). Throws
    // ProviderError on failure.
    virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dimension() const = 0;
    // Identifies the provider and its data in dataset digests.
    virtual std::string fingerprint() const = 0;
};

// Unit-normalizes in place; zero vectors stay zero.
void normalize(Embedding& v);
// Cosine similarity; 0 when either vector is zero or empty.
double cosine(std::span<const float> a, std::span<const float> b);

// Character-trigram counts of the lowercased, whitespace-collapsed text
// padded with '#', hashed (FNV-1a) into `dimension` buckets and normalized.
class TrigramProvider final : public EmbeddingProvider {
public:
    explicit TrigramProvider(std::size_t dimension = 4096);
    std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dimension_; }
    std::string fingerprint() const override;

    // Trigrams of the padded normal form, in order of occurrence.
    static std::vector<std::string> trigrams(const std::string& text);

private:
    std::size_t dimension_;
};

// Precomputed vectors: one "text<TAB>v1 v2 ... vd" record per line. Lookup
// is by normalized text. A text missing from the file gets the mean of the
// vectors of its whitespace tokens; if none of those are present either the
// provider fails.
class VectorsFileProvider final : public EmbeddingProvider {
public:
    explicit VectorsFileProvider(const std::filesystem::path& file);
    std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dimension_; }
    std::string fingerprint() const override { return fingerprint_; }
    std::size_t entries() const { return vectors_.size(); }

private:
    std::unordered_map<std::string, Embedding> vectors_;
    std::size_t dimension_ = 0;
    std::string fingerprint_;
};

// POST {"texts": [...]} to `url`, expecting {"vectors": [[...], ...]} in the
// same order. Transport failures are retried twice with backoff.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(std::string url, std::size_t batch_size = 256,
                                     std::chrono::milliseconds backoff = std::chrono::milliseconds(200));
    std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dimension_; }
    std::string fingerprint() const override { return "remote:" + url_; }

private:
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts);

    std::string url_;
    std::string host_;  // scheme://host:port
    std::string path_;
    std::size_t batch_size_;
    std::chrono::milliseconds backoff_;
    std::size_t dimension_ = 0;
};

// Memoizes vectors per text for one pipeline run.
class EmbeddingCache {
public:
    explicit EmbeddingCache(EmbeddingProvider& provider) : provider_(provider) {}
    // Embeds every text not cached yet in one provider call.
    void prefetch(const std::vector<std::string>& texts);
    const Embedding& get(const std::string& text);
    EmbeddingProvider& provider() { return provider_; }

private:
    EmbeddingProvider& provider_;
    std::unordered_map<std::string, Embedding> cache_;
};

}  // namespace hb

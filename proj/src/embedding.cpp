#include "hb/embedding.hpp"

#include "hb/digest.hpp"
#include "hb/error.hpp"
#include "hb/textnorm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace hb {

void normalize(Embedding& v) {
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    if (norm <= 0.0) return;
    const double inv = 1.0 / std::sqrt(norm);
    for (float& x : v) x = static_cast<float>(x * inv);
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.empty() || b.empty()) return 0.0;
    if (a.size() != b.size()) throw ArgumentError("cosine of vectors with different dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

TrigramProvider::TrigramProvider(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw ArgumentError("trigram dimension must be positive");
}

std::vector<std::string> TrigramProvider::trigrams(const std::string& text) {
    const std::string padded = "#" + normalize_text(text) + "#";
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) out.push_back(padded.substr(i, 3));
    return out;
}

std::vector<Embedding> TrigramProvider::embed(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        Embedding v(dimension_, 0.0f);
        for (const auto& gram : trigrams(text)) {
            std::uint64_t h = 1469598103934665603ull;
            for (unsigned char c : gram) {
                h ^= c;
                h *= 1099511628211ull;
            }
            v[h % dimension_] += 1.0f;
        }
        normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

std::string TrigramProvider::fingerprint() const {
    return "trigram:" + std::to_string(dimension_);
}

VectorsFileProvider::VectorsFileProvider(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot read vectors file " + file.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("vectors record without a tab", number);
        Embedding v;
        std::istringstream values(line.substr(tab + 1));
        std::string token;
        while (values >> token) {
            try {
                std::size_t used = 0;
                v.push_back(std::stof(token, &used));
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw ParseError("bad vector component \"" + token + "\"", number);
            }
        }
        if (v.empty()) throw ParseError("empty vector", number);
        if (dimension_ == 0) dimension_ = v.size();
        if (v.size() != dimension_)
            throw ParseError("vector dimension " + std::to_string(v.size()) + " differs from " +
                                 std::to_string(dimension_), number);
        vectors_[normalize_text(line.substr(0, tab))] = std::move(v);
    }
    if (dimension_ == 0) throw ResourceError("vectors file has no records: " + file.string());
    fingerprint_ = "vectors:" + sha256_file(file);
}

std::vector<Embedding> VectorsFileProvider::embed(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        auto key = normalize_text(text);
        if (auto it = vectors_.find(key); it != vectors_.end()) {
            out.push_back(it->second);
            normalize(out.back());
            continue;
        }
        Embedding mean(dimension_, 0.0f);
        std::size_t found = 0;
        std::istringstream words(key);
        std::string word;
        while (words >> word) {
            auto it = vectors_.find(word);
            if (it == vectors_.end()) continue;
            auto unit = it->second;
            normalize(unit);
            for (std::size_t i = 0; i < dimension_; ++i) mean[i] += unit[i];
            ++found;
        }
        if (found == 0) throw ProviderError("no vector for \"" + text + "\"");
        normalize(mean);
        out.push_back(std::move(mean));
    }
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string url, std::size_t batch_size,
                                                 std::chrono::milliseconds backoff)
    : url_(std::move(url)), batch_size_(batch_size ? batch_size : 256), backoff_(backoff) {
    auto scheme = url_.find("://");
    if (scheme == std::string::npos) throw ArgumentError("embedding URL needs a scheme: " + url_);
    auto slash = url_.find('/', scheme + 3);
    host_ = url_.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url_.substr(slash);
}

std::vector<Embedding> RemoteEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                       texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), start + batch_size_)));
        for (auto& v : embed_batch(batch)) out.push_back(std::move(v));
    }
    return out;
}

std::vector<Embedding> RemoteEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    httplib::Client client(host_);
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    const std::string body = nlohmann::json{{"texts", texts}}.dump();

    std::string failure;
    constexpr int kAttempts = 3;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(backoff_ * (1 << (attempt - 1)));
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            failure = "server returned HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw ProviderError("embedding service returned HTTP " + std::to_string(res->status));

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError(std::string("malformed embedding response: ") + e.what());
        }
        if (!reply.contains("vectors") || !reply["vectors"].is_array())
            throw ProviderError("embedding response lacks \"vectors\"");
        const auto& vectors = reply["vectors"];
        if (vectors.size() != texts.size())
            throw ProviderError("embedding response has " + std::to_string(vectors.size()) + " vectors for " +
                                std::to_string(texts.size()) + " texts");
        std::vector<Embedding> out;
        for (const auto& item : vectors) {
            Embedding v;
            try {
                v = item.get<Embedding>();
            } catch (const nlohmann::json::exception&) {
                throw ProviderError("embedding vector is not a list of numbers");
            }
            if (v.empty()) throw ProviderError("empty embedding vector");
            if (dimension_ == 0) dimension_ = v.size();
            if (v.size() != dimension_) throw ProviderError("embedding dimension changed between vectors");
            normalize(v);
            out.push_back(std::move(v));
        }
        return out;
    }
    throw ProviderError("embedding service at " + url_ + " failed after retries: " + failure);
}

void EmbeddingCache::prefetch(const std::vector<std::string>& texts) {
    std::vector<std::string> missing;
    std::set<std::string> queued;
    for (const auto& t : texts)
        if (!cache_.contains(t) && queued.insert(t).second) missing.push_back(t);
    if (missing.empty()) return;
    auto vectors = provider_.embed(missing);
    if (vectors.size() != missing.size()) throw ProviderError("provider returned the wrong number of vectors");
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(vectors[i]));
}

const Embedding& EmbeddingCache::get(const std::string& text) {
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    prefetch({text});
    return cache_.at(text);
}

}  // namespace hb

#pragma once
// Dataset registry: background builds, status tracking and immutable
// snapshots of finished DAGs.

#include "hb/pipeline.hpp"

#include <json.hpp>

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace hb {

enum class BuildStatus { pending, running, done, failed };

std::string_view to_string(BuildStatus status);
BuildStatus status_from_string(std::string_view name);

struct DatasetRecord {
    std::string id;
    std::string digest;  // sha256 of input bytes, config and resource fingerprint
    PipelineConfig config;
    BuildStatus status = BuildStatus::pending;
    std::string error;         // failure message, empty otherwise
    std::string failed_stage;  // stage name when a pipeline stage failed
    std::filesystem::path input_path;
    std::filesystem::path dag_path;
};

nlohmann::json record_to_json(const DatasetRecord& record);

using Snapshot = std::shared_ptr<const PipelineResult>;

class DatasetStore {
public:
    // Creates `directory` if needed and reloads records found there. Builds
    // that were pending or running when the previous process stopped are
    // marked failed.
    DatasetStore(std::filesystem::path directory, Resources resources);
    ~DatasetStore();

    DatasetStore(const DatasetStore&) = delete;
    DatasetStore& operator=(const DatasetStore&) = delete;

    // Starts a background build and returns its record. A dataset with the
    // same digest is returned as is (second = false) without a new build.
    std::pair<DatasetRecord, bool> create(const std::string& input, InputFormat format, const PipelineConfig& config);

    std::vector<DatasetRecord> list() const;
    std::optional<DatasetRecord> record(const std::string& id) const;
    // The finished DAG, or nullptr while not done. Throws NotFound for an
    // unknown id.
    Snapshot snapshot(const std::string& id) const;

    // Blocks until the build leaves pending/running.
    DatasetRecord wait(const std::string& id) const;

    const Resources& resources() const { return resources_; }
    const std::filesystem::path& directory() const { return directory_; }

private:
    void build(std::string id, std::string input, InputFormat format, PipelineConfig config);
    void persist(const DatasetRecord& record) const;
    void set_status(const std::string& id, BuildStatus status, const std::string& error = {},
                    const std::string& stage = {});

    std::filesystem::path directory_;
    Resources resources_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::string, DatasetRecord> records_;
    mutable std::map<std::string, Snapshot> snapshots_;
    std::vector<std::thread> workers_;
};

std::string dataset_digest(const std::string& input, const PipelineConfig& config, const Resources& resources);

}  // namespace hb

#include "hb/store.hpp"

#include "hb/digest.hpp"
#include "hb/error.hpp"
#include "hb/serialize.hpp"

#include <fstream>
#include <sstream>

namespace hb {

using nlohmann::json;

std::string_view to_string(BuildStatus status) {
    switch (status) {
        case BuildStatus::pending: return "pending";
        case BuildStatus::running: return "running";
        case BuildStatus::done: return "done";
        case BuildStatus::failed: return "failed";
    }
    return "failed";
}

BuildStatus status_from_string(std::string_view name) {
    if (name == "pending") return BuildStatus::pending;
    if (name == "running") return BuildStatus::running;
    if (name == "done") return BuildStatus::done;
    if (name == "failed") return BuildStatus::failed;
    throw ParseError("unknown build status " + std::string(name));
}

json record_to_json(const DatasetRecord& r) {
    return {{"id", r.id},
            {"digest", r.digest},
            {"config", config_to_json(r.config)},
            {"status", to_string(r.status)},
            {"error", r.error},
            {"failed_stage", r.failed_stage},
            {"input_path", r.input_path.string()},
            {"dag_path", r.dag_path.string()}};
}

namespace {

DatasetRecord record_from_json(const json& j) {
    DatasetRecord r;
    r.id = j.at("id").get<std::string>();
    r.digest = j.at("digest").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.status = status_from_string(j.at("status").get<std::string>());
    r.error = j.value("error", "");
    r.failed_stage = j.value("failed_stage", "");
    r.input_path = j.at("input_path").get<std::string>();
    r.dag_path = j.at("dag_path").get<std::string>();
    return r;
}

void write_file(const std::filesystem::path& file, const std::string& text) {
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw ResourceError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ResourceError("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string dataset_digest(const std::string& input, const PipelineConfig& config, const Resources& resources) {
    return sha256_hex(sha256_hex(input) + "\n" + config_to_json(config).dump() + "\n" + resources.fingerprint);
}

DatasetStore::DatasetStore(std::filesystem::path directory, Resources resources)
    : directory_(std::move(directory)), resources_(std::move(resources)) {
    std::filesystem::create_directories(directory_);
    for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
        auto file = entry.path() / "record.json";
        if (!entry.is_directory() || !std::filesystem::exists(file)) continue;
        DatasetRecord r;
        try {
            r = record_from_json(json::parse(read_file(file)));
        } catch (const std::exception&) {
            continue;  // unreadable leftovers are ignored
        }
        if (r.status == BuildStatus::pending || r.status == BuildStatus::running) {
            r.status = BuildStatus::failed;
            r.error = "build interrupted";
            persist(r);
        }
        records_.emplace(r.id, std::move(r));
    }
}

DatasetStore::~DatasetStore() {
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mutex_);
        workers.swap(workers_);
    }
    for (auto& t : workers)
        if (t.joinable()) t.join();
}

void DatasetStore::persist(const DatasetRecord& record) const {
    write_file(directory_ / record.id / "record.json", record_to_json(record).dump(1) + "\n");
}

std::pair<DatasetRecord, bool> DatasetStore::create(const std::string& input, InputFormat format,
                                                    const PipelineConfig& config) {
    config.validate();
    const auto digest = dataset_digest(input + (format == InputFormat::text ? "\ntext" : "\njsonl"), config, resources_);
    const auto id = digest.substr(0, 16);

    std::lock_guard lock(mutex_);
    if (auto it = records_.find(id); it != records_.end()) return {it->second, false};

    DatasetRecord r;
    r.id = id;
    r.digest = digest;
    r.config = config;
    r.status = BuildStatus::pending;
    std::filesystem::create_directories(directory_ / id);
    r.input_path = directory_ / id / (format == InputFormat::text ? "input.txt" : "input.jsonl");
    r.dag_path = directory_ / id / "dag.json";
    write_file(r.input_path, input);
    persist(r);
    records_.emplace(id, r);
    workers_.emplace_back(&DatasetStore::build, this, id, input, format, config);
    return {r, true};
}

void DatasetStore::set_status(const std::string& id, BuildStatus status, const std::string& error,
                              const std::string& stage) {
    std::lock_guard lock(mutex_);
    auto& r = records_.at(id);
    r.status = status;
    r.error = error;
    r.failed_stage = stage;
    persist(r);
    changed_.notify_all();
}

void DatasetStore::build(std::string id, std::string input, InputFormat format, PipelineConfig config) {
    set_status(id, BuildStatus::running);
    try {
        std::istringstream in(input);
        auto spans = parse_input(in, format);
        auto result = std::make_shared<PipelineResult>(run_pipeline(spans, resources_, config));
        std::filesystem::path dag_path;
        {
            std::lock_guard lock(mutex_);
            dag_path = records_.at(id).dag_path;
        }
        save_result(*result, dag_path);
        {
            // Publish the snapshot and the status together.
            std::lock_guard lock(mutex_);
            snapshots_[id] = std::move(result);
            auto& r = records_.at(id);
            r.status = BuildStatus::done;
            persist(r);
        }
        changed_.notify_all();
    } catch (const PipelineError& e) {
        set_status(id, BuildStatus::failed, e.what(), e.stage());
    } catch (const std::exception& e) {
        set_status(id, BuildStatus::failed, e.what());
    }
}

std::vector<DatasetRecord> DatasetStore::list() const {
    std::lock_guard lock(mutex_);
    std::vector<DatasetRecord> out;
    for (const auto& [id, r] : records_) out.push_back(r);
    return out;
}

std::optional<DatasetRecord> DatasetStore::record(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

Snapshot DatasetStore::snapshot(const std::string& id) const {
    std::filesystem::path dag_path;
    {
        std::lock_guard lock(mutex_);
        auto it = records_.find(id);
        if (it == records_.end()) throw NotFound("unknown dataset " + id);
        if (it->second.status != BuildStatus::done) return nullptr;
        if (auto s = snapshots_.find(id); s != snapshots_.end()) return s->second;
        dag_path = it->second.dag_path;
    }
    // Finished in an earlier process: load lazily.
    auto loaded = std::make_shared<const PipelineResult>(load_result_file(dag_path));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = snapshots_.emplace(id, loaded);
    return it->second;
}

DatasetRecord DatasetStore::wait(const std::string& id) const {
    std::unique_lock lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) throw NotFound("unknown dataset " + id);
    changed_.wait(lock, [&] {
        auto s = records_.at(id).status;
        return s == BuildStatus::done || s == BuildStatus::failed;
    });
    return records_.at(id);
}

}  // namespace hb

#include "hb/service.hpp"

#include "hb/error.hpp"
#include "hb/evalkit.hpp"
#include "hb/reports.hpp"
#include "hb/serialize.hpp"

#include <httplib.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <thread>

namespace hb {

using nlohmann::json;

namespace {

// Dataset exists but its build has not finished.
class NotReady : public Error {
public:
    using Error::Error;
};

// Derived data computed once per published snapshot.
struct View {
    Snapshot result;
    std::unordered_map<NodeId, std::vector<NodeId>> reach;
};

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void fail(httplib::Response& res, int status, const std::string& message) {
    send(res, status, {{"error", message}});
}

NodeId parse_node(const std::string& s) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(s, &used);
        if (used != s.size() || v > std::numeric_limits<NodeId>::max()) throw NotFound("unknown node " + s);
        return static_cast<NodeId>(v);
    } catch (const std::logic_error&) {
        throw NotFound("unknown node " + s);
    }
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
    if (!req.has_param(key)) return fallback;
    try {
        return std::stoull(req.get_param_value(key));
    } catch (const std::logic_error&) {
        throw ArgumentError(std::string("bad value for ") + key);
    }
}

}  // namespace

struct Service::Impl {
    explicit Impl(DatasetStore& s) : store(s) {
        // httplib's default adds SO_REUSEPORT, which lets a second server share a busy port.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
    }

    DatasetStore& store;
    httplib::Server server;
    std::thread thread;
    std::mutex views_mutex;
    std::map<std::string, std::shared_ptr<const View>> views;

    std::shared_ptr<const View> view(const std::string& id) {
        auto snap = store.snapshot(id);  // NotFound for unknown ids
        if (!snap) throw NotReady("dataset " + id + " is not built yet");
        std::lock_guard lock(views_mutex);
        auto& slot = views[id];
        if (!slot || slot->result != snap) {
            auto v = std::make_shared<View>();
            v->result = snap;
            v->reach = all_reachable_inputs(snap->dag);
            slot = std::move(v);
        }
        return slot;
    }

    // Maps library errors onto status codes.
    template <class F>
    httplib::Server::Handler guarded(F body) {
        return [body](const httplib::Request& req, httplib::Response& res) {
            try {
                body(req, res);
            } catch (const NotFound& e) {
                fail(res, 404, e.what());
            } catch (const NotReady& e) {
                fail(res, 409, e.what());
            } catch (const ArgumentError& e) {
                fail(res, 400, e.what());
            } catch (const ParseError& e) {
                fail(res, 400, e.what());
            } catch (const json::exception& e) {
                fail(res, 400, e.what());
            } catch (const std::exception& e) {
                fail(res, 500, e.what());
            }
        };
    }

    void routes() {
        server.Get("/datasets", guarded([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& r : store.list()) out.push_back(record_to_json(r));
            send(res, 200, {{"datasets", out}});
        }));

        server.Post("/datasets", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto body = json::parse(req.body);
            if (!body.is_object() || !body.contains("input") || !body["input"].is_string())
                throw ArgumentError("body needs a string \"input\"");
            auto format = InputFormat::jsonl;
            if (body.contains("format")) {
                auto f = body["format"].get<std::string>();
                if (f == "text") format = InputFormat::text;
                else if (f != "jsonl") throw ArgumentError("format must be jsonl or text");
            }
            PipelineConfig config;
            if (body.contains("config")) config = config_from_json(body["config"]);
            auto [record, created] = store.create(body["input"].get<std::string>(), format, config);
            send(res, created ? 202 : 200, record_to_json(record));
        }));

        server.Get(R"(/datasets/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto r = store.record(req.matches[1]);
            if (!r) throw NotFound("unknown dataset " + std::string(req.matches[1]));
            send(res, 200, record_to_json(*r));
        }));

        server.Get(R"(/datasets/([^/]+)/entry-points)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto v = view(req.matches[1]);
                       const auto& nav = v->result->navigation;
                       json entries = json::array();
                       for (auto e : nav.entry_points) entries.push_back(node_summary(*v->result, e, v->reach));
                       send(res, 200,
                            {{"entry_points", entries}, {"other", node_summary(*v->result, nav.other_node, v->reach)}});
                   }));

        server.Get(R"(/datasets/([^/]+)/nodes/(\d+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto v = view(req.matches[1]);
                       const auto& result = *v->result;
                       auto id = parse_node(req.matches[2]);
                       auto out = node_summary(result, id, v->reach);
                       if (result.dag.contains(id)) {
                           const auto& node = result.dag.node(id);
                           out["node"] = node_to_json(node);
                           out["parents"] = result.dag.parents(id);
                       }
                       send(res, 200, out);
                   }));

        server.Get(R"(/datasets/([^/]+)/nodes/(\d+)/children)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto v = view(req.matches[1]);
                       const auto& result = *v->result;
                       auto id = parse_node(req.matches[2]);
                       if (!result.dag.contains(id) && id != result.navigation.other_node)
                           throw NotFound("unknown node " + std::to_string(id));
                       const auto offset = query_size(req, "offset", 0);
                       const auto limit = query_size(req, "limit", kChildrenPageSize);
                       static const std::vector<NodeId> kNone;
                       auto it = result.navigation.display_order.find(id);
                       const auto& kids = it == result.navigation.display_order.end() ? kNone : it->second;
                       json page = json::array();
                       for (std::size_t i = offset; i < kids.size() && i < offset + limit; ++i)
                           page.push_back(node_summary(result, kids[i], v->reach));
                       send(res, 200, {{"children", page}, {"total", kids.size()}, {"offset", offset}});
                   }));

        server.Get(R"(/datasets/([^/]+)/search)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto v = view(req.matches[1]);
            const auto& result = *v->result;
            auto q = normalize_text(req.get_param_value("q"));
            if (q.empty()) throw ArgumentError("empty query");
            const auto limit = query_size(req, "limit", 50);
            json matches = json::array();
            std::size_t total = 0;
            for (const auto& [id, node] : result.dag.nodes()) {
                if (node.origin == Origin::root) continue;
                bool hit = normalize_text(representative_of(node)).find(q) != std::string::npos;
                for (const auto& m : node.members) hit = hit || normalize_text(m.text).find(q) != std::string::npos;
                if (!hit) continue;
                if (++total > limit) continue;
                auto effort = dag_effort(result.dag, result.navigation, {id});
                auto item = node_summary(result, id, v->reach);
                item["path"] = effort.path;
                item["effort"] = effort.found ? json(effort.effort) : json();
                matches.push_back(std::move(item));
            }
            send(res, 200, {{"query", q}, {"results", matches}, {"total", total}});
        }));

        server.Get(R"(/datasets/([^/]+)/metrics)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto v = view(req.matches[1]);
            const auto& result = *v->result;
            send(res, 200,
                 {{"metrics", metrics_to_json(graph_metrics(result.dag, result.navigation))},
                  {"components", components_to_json(component_report(result.trace))}});
        }));

        server.Post(R"(/datasets/([^/]+)/effort)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto v = view(req.matches[1]);
            const auto& result = *v->result;
            auto body = json::parse(req.body);
            if (!body.is_object() || !body.contains("targets") || !body["targets"].is_array())
                throw ArgumentError("body needs a \"targets\" array");
            auto targets = body["targets"].get<std::vector<std::string>>();
            auto report = evaluate_targets(result.dag, result.navigation, targets, store.resources().lexicon,
                                           result.classes);
            send(res, 200, effort_to_json(report));
        }));
    }
};

Service::Service(DatasetStore& store) : impl_(std::make_unique<Impl>(store)) { impl_->routes(); }

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) bound = impl_->server.bind_to_any_port(host);
    else if (!impl_->server.bind_to_port(host, port)) bound = -1;
    if (bound < 0) throw ResourceError("cannot listen on " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::run(const std::string& host, int port) {
    if (!impl_->server.listen(host, port))
        throw ResourceError("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace hb

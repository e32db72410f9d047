#include "strata/service.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "strata/canonical_json.hpp"
#include "strata/config.hpp"
#include "strata/persistence.hpp"
#include "strata/pipeline.hpp"
#include "strata/temporal.hpp"

namespace strata {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Event {
    std::uint64_t seq = 0;
    std::string type;
    std::string data;
};

class EventLog {
public:
    void push(std::string type, const json& data) {
        {
            std::lock_guard lock(mutex_);
            events_.push_back({events_.size() + 1, std::move(type), canonical_dump(data)});
        }
        cv_.notify_all();
    }

    // Events with seq > after, waiting up to `timeout` for the first one.
    std::vector<Event> wait_after(std::uint64_t after, std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, timeout, [&] { return closed_ || events_.size() > after; });
        if (events_.size() <= after) return {};
        return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    bool closed() {
        std::lock_guard lock(mutex_);
        return closed_;
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<Event> events_;
    bool closed_ = false;
};

struct LiveView {
    int batch_index = -1;
    std::uint64_t steps_taken = 0;
    std::vector<NodeState> nodes;
};

struct Session {
    std::string id;
    RunConfig cfg;
    std::vector<std::vector<DataRecord>> batches;
    std::map<std::string, const DataRecord*> record_by_id;

    std::mutex advance_mutex;
    std::unique_ptr<Pipeline> pipeline;  // guarded by advance_mutex

    std::mutex publish_mutex;
    std::vector<std::shared_ptr<const TimestepSnapshot>> published;
    std::shared_ptr<const LiveView> live;

    EventLog events;

    std::vector<std::shared_ptr<const TimestepSnapshot>> snapshots() {
        std::lock_guard lock(publish_mutex);
        return published;
    }
};

std::shared_ptr<const LiveView> live_from(const LayoutEngine& engine) {
    auto view = std::make_shared<LiveView>();
    view->batch_index = engine.current_batch();
    view->steps_taken = engine.steps_taken();
    view->nodes.reserve(engine.size());
    for (const auto& n : engine.nodes()) view->nodes.push_back({n.record_id, n.position, n.batch_index});
    return view;
}

json node_json(const NodeState& n) {
    return {{"id", n.id}, {"x", n.position.x}, {"y", n.position.y}, {"z", n.position.z}, {"batch_index", n.batch_index}};
}

json summary_json(const TimestepSnapshot& snap, const std::string& session_id) {
    json clusters = json::array();
    for (const auto& c : snap.clusters) {
        clusters.push_back({{"cluster_id", c.cluster_id},
                            {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
                            {"size", c.member_ids.size()},
                            {"label", c.labels.display()}});
    }
    return {{"batch_index", snap.batch_index},
            {"snapshot", "/sessions/" + session_id + "/snapshots/" + std::to_string(snap.batch_index)},
            {"n_nodes", snap.nodes.size()},
            {"n_misc", snap.misc_ids.size()},
            {"threshold", snap.threshold ? json(*snap.threshold) : json(nullptr)},
            {"stress", snap.stress},
            {"clusters", clusters}};
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(canonical_dump(body), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                 std::size_t line = 0) {
    json body = {{"error", code}, {"message", message}};
    if (line > 0) body["line"] = line;
    reply(res, status, body);
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::thread thread;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::uint64_t next_session = 1;
    std::atomic<bool> stopping{false};

    explicit Impl(ServiceOptions opts) : options(std::move(opts)) { routes(); }

    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        const auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    // Runs `body` for a known session, mapping library errors to 400.
    template <typename F>
    void with_session(const httplib::Request& req, httplib::Response& res, F&& body) {
        auto session = find(req.matches[1]);
        if (!session) return reply_error(res, 404, "UnknownSession", "no session '" + std::string(req.matches[1]) + "'");
        try {
            body(*session);
        } catch (const Error& e) {
            reply_error(res, 400, std::string(to_string(e.code())), e.detail(), e.line());
        }
    }

    void create_session(const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            return reply_error(res, 400, "InvalidRequest", e.what());
        }
        if (!body.is_object() || !body.contains("dataset_path") || !body["dataset_path"].is_string())
            return reply_error(res, 400, "InvalidRequest", "dataset_path is required");
        try {
            auto session = std::make_shared<Session>();
            const auto records = load_dataset(body["dataset_path"].get<std::string>());
            session->cfg = run_config_from_json(body.value("run_config", json::object()));
            session->cfg.timestep = resolve_origin(session->cfg.timestep, records);
            session->batches = group_into_batches(records, session->cfg.timestep);
            for (const auto& batch : session->batches)
                for (const auto& r : batch) session->record_by_id.emplace(r.id, &r);
            auto client = options.label_client ? options.label_client : make_label_client(session->cfg.labels);
            session->pipeline = std::make_unique<Pipeline>(session->cfg, std::move(client));
            {
                std::lock_guard lock(sessions_mutex);
                session->id = "s" + std::to_string(next_session++);
                sessions.emplace(session->id, session);
            }
            reply(res, 201,
                  {{"session_id", session->id},
                   {"n_records", records.size()},
                   {"n_batches", session->batches.size()},
                   {"origin", format_iso8601(*session->cfg.timestep.origin)},
                   {"timestep", format_timestep(session->cfg.timestep)}});
        } catch (const Error& e) {
            reply_error(res, 400, std::string(to_string(e.code())), e.detail(), e.line());
        }
    }

    void advance(Session& s, httplib::Response& res) {
        std::unique_lock lock(s.advance_mutex, std::try_to_lock);
        if (!lock.owns_lock()) return reply_error(res, 409, "AdvanceInProgress", "an advance is already running");
        const auto next = static_cast<std::size_t>(s.pipeline->next_batch());
        if (next >= s.batches.size()) return reply_error(res, 409, "Exhausted", "every batch has been advanced");

        const auto min_gap = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(1.0 / options.step_events_per_second));
        auto last_emit = Clock::now() - min_gap;
        AdvanceObserver observer;
        observer.on_step = [&](const StepReport& report, const LayoutEngine& engine) {
            const auto now = Clock::now();
            if (now - last_emit < min_gap) return;
            last_emit = now;
            auto view = live_from(engine);
            {
                std::lock_guard guard(s.publish_mutex);
                s.live = view;
            }
            s.events.push("step", {{"batch_index", static_cast<int>(next)},
                                   {"step", engine.steps_taken()},
                                   {"max_displacement", report.max_displacement},
                                   {"total_stress", report.total_stress}});
        };

        auto snapshot = std::make_shared<const TimestepSnapshot>(s.pipeline->advance(s.batches[next], observer));
        {
            std::lock_guard guard(s.publish_mutex);
            s.published.push_back(snapshot);
            s.live = live_from(s.pipeline->engine());
        }
        const auto summary = summary_json(*snapshot, s.id);
        s.events.push("batch_advanced", summary);
        json labels = json::array();
        for (const auto& c : snapshot->clusters) {
            labels.push_back({{"cluster_id", c.cluster_id},
                              {"label", c.labels.display()},
                              {"tfidf", c.labels.tfidf},
                              {"llm", c.labels.llm ? json(*c.labels.llm) : json(nullptr)}});
        }
        s.events.push("labeling_completed", {{"batch_index", snapshot->batch_index}, {"labels", labels}});
        reply(res, 200, summary);
    }

    void live(Session& s, httplib::Response& res) {
        std::shared_ptr<const LiveView> view;
        std::shared_ptr<const TimestepSnapshot> latest;
        {
            std::lock_guard guard(s.publish_mutex);
            view = s.live;
            if (!s.published.empty()) latest = s.published.back();
        }
        json nodes = json::array();
        if (view)
            for (const auto& n : view->nodes) nodes.push_back(node_json(n));
        json clusters = json::array();
        json misc = json::array();
        if (latest) {
            for (const auto& c : latest->clusters) {
                clusters.push_back({{"cluster_id", c.cluster_id},
                                    {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
                                    {"member_ids", c.member_ids},
                                    {"label", c.labels.display()}});
            }
            misc = latest->misc_ids;
        }
        reply(res, 200,
              {{"batch_index", view ? json(view->batch_index) : json(nullptr)},
               {"steps_taken", view ? view->steps_taken : 0},
               {"clustering_batch_index", latest ? json(latest->batch_index) : json(nullptr)},
               {"nodes", nodes},
               {"clusters", clusters},
               {"misc_ids", misc}});
    }

    void members(Session& s, const std::string& cid_text, httplib::Response& res) {
        std::int64_t cid = 0;
        try {
            cid = std::stoll(cid_text);
        } catch (const std::exception&) {
            return reply_error(res, 404, "UnknownCluster", "no cluster '" + cid_text + "'");
        }
        const auto published = s.snapshots();
        for (auto it = published.rbegin(); it != published.rend(); ++it) {
            const auto* cluster = (*it)->find_cluster(cid);
            if (!cluster) continue;
            json members = json::array();
            for (const auto& id : cluster->member_ids) {
                json record = record_to_json(*s.record_by_id.at(id));
                record.erase("embedding");
                members.push_back(std::move(record));
            }
            return reply(res, 200,
                         {{"cluster_id", cid},
                          {"batch_index", (*it)->batch_index},
                          {"label", cluster->labels.display()},
                          {"members", members}});
        }
        reply_error(res, 404, "UnknownCluster", "no cluster " + cid_text);
    }

    void stream(std::shared_ptr<Session> session, const httplib::Request& req, httplib::Response& res) {
        std::uint64_t after = 0;
        if (req.has_header("Last-Event-ID")) after = std::stoull(req.get_header_value("Last-Event-ID"));
        if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
        std::uint64_t remaining = 0;  // 0: unlimited
        if (req.has_param("max_events")) remaining = std::stoull(req.get_param_value("max_events"));
        const auto keepalive = options.stream_keepalive;
        auto last_write = std::make_shared<Clock::time_point>(Clock::now());

        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, session, after, remaining, keepalive, last_write](std::size_t, httplib::DataSink& sink) mutable {
                if (stopping || session->events.closed()) {
                    sink.done();
                    return true;
                }
                const auto wait = std::min<std::chrono::milliseconds>(keepalive, std::chrono::milliseconds{500});
                for (const auto& e : session->events.wait_after(after, wait)) {
                    const std::string frame = "id: " + std::to_string(e.seq) + "\nevent: " + e.type +
                                              "\ndata: " + e.data + "\n\n";
                    if (!sink.write(frame.data(), frame.size())) return false;
                    after = e.seq;
                    *last_write = Clock::now();
                    if (remaining > 0 && --remaining == 0) {
                        sink.done();
                        return true;
                    }
                }
                if (Clock::now() - *last_write >= keepalive) {
                    static constexpr char ping[] = ": keepalive\n\n";
                    if (!sink.write(ping, sizeof ping - 1)) return false;
                    *last_write = Clock::now();
                }
                return true;
            });
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create_session(req, res); });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                const auto published = s.snapshots();
                reply(res, 200,
                      {{"session_id", s.id},
                       {"n_batches", s.batches.size()},
                       {"n_snapshots", published.size()},
                       {"timestep", format_timestep(s.cfg.timestep)},
                       {"z_spacing", s.cfg.z_spacing}});
            });
        });
        server.Post(R"(/sessions/([^/]+)/advance)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) { advance(s, res); });
        });
        server.Get(R"(/sessions/([^/]+)/snapshots/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                const auto published = s.snapshots();
                const auto k = std::stoull(req.matches[2]);
                if (k >= published.size())
                    return reply_error(res, 404, "UnknownSnapshot", "snapshot " + std::string(req.matches[2]) +
                                                                        " has not been produced");
                res.set_content(serialize_snapshot(*published[k]), "application/json");
            });
        });
        server.Get(R"(/sessions/([^/]+)/live)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) { live(s, res); });
        });
        server.Get(R"(/sessions/([^/]+)/lineage)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                std::vector<TimestepSnapshot> snaps;
                for (const auto& p : s.snapshots()) snaps.push_back(*p);
                reply(res, 200, lineage_to_json(snaps, s.cfg.z_spacing));
            });
        });
        server.Get(R"(/sessions/([^/]+)/clusters/([^/]+)/members)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       with_session(req, res, [&](Session& s) { members(s, req.matches[2], res); });
                   });
        server.Get(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
            auto session = find(req.matches[1]);
            if (!session)
                return reply_error(res, 404, "UnknownSession", "no session '" + std::string(req.matches[1]) + "'");
            stream(std::move(session), req, res);
        });
    }

    void close_streams() {
        std::lock_guard lock(sessions_mutex);
        for (auto& [id, s] : sessions) s->events.close();
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::run(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
    if (!impl_) return;
    impl_->stopping = true;
    impl_->close_streams();
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace strata

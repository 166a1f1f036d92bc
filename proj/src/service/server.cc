#include "nlstplan/service/server.h"

#include <charconv>
#include <deque>
#include <mutex>

#include "httplib.h"
#include "nlstplan/planner/plan.h"

namespace nlstplan::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, {{"error", {{"message", message}, {"status", status}}}}, status);
}

std::optional<long long> parse_int(const std::string& s) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

struct Server::Impl {
    const Engine& engine;
    ServerOptions opts;
    httplib::Server http;

    std::mutex mu;
    std::map<std::string, json> trees;
    std::deque<std::string> order;
    std::string last_id;

    Impl(const Engine& e, ServerOptions o) : engine(e), opts(std::move(o)) { routes(); }

    void remember(const std::string& id, json tree) {
        std::lock_guard lock(mu);
        if (trees.emplace(id, std::move(tree)).second) {
            order.push_back(id);
            while (order.size() > opts.plan_cache) {
                trees.erase(order.front());
                order.pop_front();
            }
        }
        last_id = id;
    }

    const catalog::Database* db_param(const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("db")) {
            send_error(res, 400, "missing parameter db");
            return nullptr;
        }
        const auto* db = engine.find(req.get_param_value("db"));
        if (!db) send_error(res, 404, "unknown database " + req.get_param_value("db"));
        return db;
    }

    void query(const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "request body must be a JSON object");
        if (!body.contains("db") || !body["db"].is_string()) return send_error(res, 400, "db must be a string");
        if (!body.contains("nlq") || !body["nlq"].is_string()) return send_error(res, 400, "nlq must be a string");
        bool optimize = false;
        if (body.contains("optimize")) {
            if (!body["optimize"].is_boolean()) return send_error(res, 400, "optimize must be a boolean");
            optimize = body["optimize"].get<bool>();
        }
        const auto nlq = body["nlq"].get<std::string>();
        if (nlq.find_first_not_of(" \t\r\n") == std::string::npos) return send_error(res, 400, "nlq is empty");
        const auto* db = engine.find(body["db"].get<std::string>());
        if (!db) return send_error(res, 404, "unknown database " + body["db"].get<std::string>());
        auto r = engine.query(*db, nlq, optimize);
        if (r.plan) remember(r.plan_id(), planner::plan_tree(*r.plan));
        send_json(res, r.to_json());
    }

    void knowledge(const httplib::Request& req, httplib::Response& res) {
        const auto* db = db_param(req, res);
        if (!db) return;
        const auto q = req.get_param_value("q");
        if (q.find_first_not_of(" \t\r\n") == std::string::npos) return send_error(res, 400, "q is empty");
        send_json(res, knowledge_json(*db, q));
    }

    void corpus(const httplib::Request& req, httplib::Response& res) {
        const auto* db = db_param(req, res);
        if (!db) return;
        auto n = parse_int(req.get_param_value("n"));
        if (!n || *n < 1) return send_error(res, 400, "n must be a positive integer");
        if (static_cast<unsigned long long>(*n) > opts.max_corpus) {
            return send_error(res, 400, "n exceeds " + std::to_string(opts.max_corpus));
        }
        std::optional<QueryType> type;
        if (req.has_param("type") && !req.get_param_value("type").empty()) {
            type = parse_type(req.get_param_value("type"));
            if (!type) return send_error(res, 400, "unknown query type " + req.get_param_value("type"));
        }
        std::vector<corpus::CorpusEntry> entries;
        try {
            // round-robin generation gives exactly n of each type out of 7n
            entries = corpus::generate(*db, type ? kQueryTypeCount * *n : *n, engine.options().seed);
        } catch (const Error& e) {
            return send_error(res, 422, e.what());
        }
        json out = json::array();
        for (const auto& e : entries) {
            if (!type || e.type == *type) out.push_back(corpus::to_json(e));
        }
        send_json(res, out);
    }

    void plan_tree(const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(mu);
        const auto id = req.has_param("id") ? req.get_param_value("id") : last_id;
        auto it = trees.find(id);
        if (it == trees.end()) return send_error(res, 404, id.empty() ? "no plan yet" : "unknown plan id " + id);
        send_json(res, {{"id", id}, {"operator_tree", it->second}});
    }

    void routes() {
        http.Post("/api/query", [this](const auto& req, auto& res) { query(req, res); });
        http.Get("/api/knowledge", [this](const auto& req, auto& res) { knowledge(req, res); });
        http.Get("/api/corpus", [this](const auto& req, auto& res) { corpus(req, res); });
        http.Get("/api/databases", [this](const auto&, auto& res) { send_json(res, databases_json(engine.databases())); });
        http.Get("/api/plan-tree", [this](const auto& req, auto& res) { plan_tree(req, res); });
        http.set_exception_handler([](const auto&, auto& res, std::exception_ptr ep) {
            std::string msg = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                msg = e.what();
            } catch (...) {
            }
            send_error(res, 500, msg);
        });
        if (opts.static_dir && std::filesystem::is_directory(*opts.static_dir)) {
            http.set_mount_point("/", opts.static_dir->string());
        }
    }
};

Server::Server(const Engine& engine, ServerOptions options) : impl_(std::make_unique<Impl>(engine, std::move(options))) {}

Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::run() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace nlstplan::service

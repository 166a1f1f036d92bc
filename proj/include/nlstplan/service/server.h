#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "nlstplan/service/engine.h"

namespace nlstplan::service {

struct ServerOptions {
    /// Static web console assets served under "/" when the directory exists.
    std::optional<std::filesystem::path> static_dir;
    /// Operator trees kept for /api/plan-tree.
    std::size_t plan_cache = 256;
    /// Largest n accepted by /api/corpus.
    std::size_t max_corpus = 5000;
};

/// HTTP front end over an Engine. Routes:
///   POST /api/query        {db, nlq, optimize}
///   GET  /api/knowledge    ?db&q
///   GET  /api/corpus       ?db&n[&type]
///   GET  /api/databases
///   GET  /api/plan-tree    [?id]
class Server {
public:
    Server(const Engine& engine, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool run();
    void stop();
    /// Blocks until the listener is accepting connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nlstplan::service

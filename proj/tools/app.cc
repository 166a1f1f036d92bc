#include "app.h"

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "nlstplan/catalog/database.h"
#include "nlstplan/service/server.h"

namespace nlstplan::app {

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

std::filesystem::path default_data_dir() { return std::filesystem::path(NLSTPLAN_SOURCE_DIR) / "data"; }

std::filesystem::path default_model_path() { return std::filesystem::path(NLSTPLAN_SOURCE_DIR) / "models" / "classifier.json"; }

std::filesystem::path data_root(const std::string& flag) {
    if (const char* env = std::getenv("NLSTPLAN_DATA"); env && *env) return env;
    return flag.empty() ? default_data_dir() : std::filesystem::path(flag);
}

std::unique_ptr<service::Engine> make_engine(const std::filesystem::path& data, const std::string& model,
                                             std::uint64_t seed) {
    auto dbs = catalog::load_all(data);
    std::optional<std::filesystem::path> path;
    if (!model.empty()) {
        path = model;
    } else if (std::filesystem::exists(default_model_path())) {
        path = default_model_path();
    }
    std::unique_ptr<nlu::TypeClassifier> clf;
    if (!path && dbs.empty()) {
        throw Error(ErrorCode::ModelLoadError, "no model file and no datasets to train on");
    }
    clf = service::load_or_train(path, dbs, seed);
    service::EngineOptions opts;
    opts.seed = seed;
    return std::make_unique<service::Engine>(std::move(dbs), std::move(clf), opts);
}

int serve(const ServeOptions& opts) {
    auto engine = make_engine(data_root(opts.data), opts.model, opts.seed);
    service::ServerOptions so;
    std::filesystem::path assets = opts.static_dir.empty() ? std::filesystem::path(NLSTPLAN_SOURCE_DIR) / "webui" / "dist"
                                                           : std::filesystem::path(opts.static_dir);
    if (std::filesystem::is_directory(assets)) so.static_dir = assets;
    service::Server server(*engine, so);
    const int port = server.bind(opts.host, opts.port);
    if (port < 0) {
        std::cerr << "cannot bind " << opts.host << ":" << opts.port << "\n";
        return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving " << engine->databases().size() << " database(s) on http://" << opts.host << ":" << port << "\n";
    const bool ok = server.run();
    g_server = nullptr;
    return ok ? 0 : 1;
}

}  // namespace nlstplan::app

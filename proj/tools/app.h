#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "nlstplan/service/engine.h"

namespace nlstplan::app {

/// NLSTPLAN_DATA when set, else `flag`.
std::filesystem::path data_root(const std::string& flag);

/// The source tree's data/ directory.
std::filesystem::path default_data_dir();
/// The shipped model; may not exist.
std::filesystem::path default_model_path();

/// Loads every dataset and the classifier. An empty `model` means the shipped model when it
/// exists, otherwise a freshly trained one.
std::unique_ptr<service::Engine> make_engine(const std::filesystem::path& data, const std::string& model,
                                             std::uint64_t seed);

struct ServeOptions {
    std::string data;
    std::string model;
    std::string host = "0.0.0.0";
    int port = 8080;
    std::uint64_t seed = 42;
    std::string static_dir;
};

/// Blocks serving HTTP until the process is stopped. Returns a process exit code.
int serve(const ServeOptions& opts);

}  // namespace nlstplan::app

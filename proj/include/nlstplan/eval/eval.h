#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/service/engine.h"

namespace nlstplan::eval {

struct TypeCounts {
    std::size_t n = 0;
    std::size_t translated = 0;
    std::size_t correct = 0;
};

struct Failure {
    std::string db;
    std::string nlq;
    QueryType expected_type = QueryType::BasicSpatial;
    /// "translation" or "result"
    std::string stage;
    std::string message;
};

struct EvalReport {
    std::size_t n = 0;
    std::size_t translated = 0;
    std::size_t correct = 0;
    /// translated / n
    double translatability = 0;
    /// correct / translated, 0 when nothing translated
    double precision = 0;
    double mean_response_ms = 0;
    double p95_response_ms = 0;
    std::map<QueryType, TypeCounts> per_type;
    std::vector<Failure> failures;
    /// End-to-end time per entry, in corpus order.
    std::vector<double> response_ms;

    nlohmann::json to_json() const;
};

struct EvalOptions {
    /// Run the optimizer as part of each query, as the service does.
    bool optimize = true;
};

/// Runs every entry through the engine. An entry is translated when the pipeline yields a
/// plan and a result without error, and correct when that result equals the result of the
/// plan instantiated directly from the entry's ground-truth slots and type.
EvalReport evaluate(const service::Engine& engine, const catalog::Database& db,
                    const std::vector<corpus::CorpusEntry>& entries, EvalOptions options = {});

/// Pools entries and timings of several reports and recomputes the ratios.
EvalReport merge(const std::vector<EvalReport>& reports);

}  // namespace nlstplan::eval

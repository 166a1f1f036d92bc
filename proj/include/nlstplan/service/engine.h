#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/error.h"
#include "nlstplan/nlu/classifier.h"
#include "nlstplan/planner/exec.h"

namespace nlstplan::service {

struct EngineOptions {
    std::uint64_t seed = 42;
    /// Fraction of each relation the optimizer samples for cost estimates.
    double sample_fraction = 0.1;
    /// Tuples drawn per filter site for the selectivity estimate.
    std::size_t selectivity_sample = 1000;
};

/// unsupported-type | syntax | entity
std::string error_category(ErrorCode code);

struct ErrorInfo {
    std::string category;
    std::string code;
    std::string message;
    std::vector<std::string> suggestions;
    /// Offending text for entity errors.
    std::optional<std::string> span;
};

struct QueryResponse {
    std::string db;
    std::string nlq;
    /// {"tokens", "tagged_spans", "extraction", "classification"}; stages not reached are null.
    nlohmann::json trace;
    std::vector<std::string> warnings;
    std::optional<QueryType> type;
    std::optional<planner::PhysicalPlan> baseline;
    /// Plan actually executed; the optimizer's choice when optimizing.
    std::optional<planner::PhysicalPlan> plan;
    std::optional<nlohmann::json> optimizer;
    std::optional<planner::ResultSet> result;
    double translation_ms = 0;
    double baseline_ms = 0;
    std::optional<double> optimized_ms;
    std::optional<ErrorInfo> error;

    /// Stable identifier of the executed plan: a hash of the database name and plan text.
    std::string plan_id() const;
    nlohmann::json to_json() const;
};

/// Shared, immutable query pipeline over a set of loaded databases.
class Engine {
public:
    Engine(std::vector<catalog::Database> databases, std::unique_ptr<nlu::TypeClassifier> classifier,
           EngineOptions options = {});

    const std::vector<catalog::Database>& databases() const { return dbs_; }
    const catalog::Database* find(std::string_view name) const;
    const nlu::TypeClassifier& classifier() const { return *clf_; }
    const EngineOptions& options() const { return opts_; }

    /// coarse_tag, fine_extract, classify, map_query, optionally optimize, execute.
    /// User-level failures are reported in `error`; only internal faults throw.
    QueryResponse query(const catalog::Database& db, std::string_view nlq, bool optimize) const;

    /// Up to n example NLQs for the help flow, of `type` when given.
    std::vector<std::string> examples(const catalog::Database& db, std::optional<QueryType> type, std::size_t n) const;

private:
    std::vector<catalog::Database> dbs_;
    std::unique_ptr<nlu::TypeClassifier> clf_;
    EngineOptions opts_;
    std::map<std::string, std::vector<corpus::CorpusEntry>, std::less<>> examples_;
};

/// Training corpus used when no model file is available: 700 generated entries per database.
std::vector<corpus::CorpusEntry> default_training_corpus(const std::vector<catalog::Database>& dbs, std::uint64_t seed);

/// The model at `model` when given (ModelLoadError when unreadable); otherwise a classifier
/// trained on default_training_corpus.
std::unique_ptr<nlu::TypeClassifier> load_or_train(const std::optional<std::filesystem::path>& model,
                                                   const std::vector<catalog::Database>& dbs, std::uint64_t seed);

/// Serialized KB matches for the knowledge endpoint: kind, name, relation, score, surface and
/// the matched entity's MBR as [xmin, ymin, xmax, ymax] (null when it has no extent).
nlohmann::json knowledge_json(const catalog::Database& db, std::string_view q);

/// Databases with their declared relations, attributes and statistics.
nlohmann::json databases_json(const std::vector<catalog::Database>& dbs);

}  // namespace nlstplan::service

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/corpus/query_type.h"

namespace nlstplan::nlu {

struct Classification {
    QueryType type = QueryType::BasicSpatial;
    /// Class probabilities in QueryType order.
    std::array<double, kQueryTypeCount> scores{};
};

/// Query-type model interface. Implementations are immutable after construction.
class TypeClassifier {
public:
    virtual ~TypeClassifier() = default;
    virtual Classification classify(std::string_view nlq) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// Unigram + bigram features of the normalized token stream; numbers become <num>, clock
/// times <time>.
std::vector<std::string> features(std::string_view nlq);

/// Multinomial logistic regression over binary bag-of-features.
class LinearClassifier : public TypeClassifier {
public:
    static constexpr std::string_view kVersion = "nlstplan-linear-1";

    LinearClassifier(std::vector<std::string> vocabulary, std::vector<std::vector<double>> weights,
                     std::vector<double> bias);

    Classification classify(std::string_view nlq) const override;
    nlohmann::json to_json() const override;

    const std::vector<std::string>& vocabulary() const { return vocab_; }
    /// weights()[c][f] for class c (QueryType order) and feature f.
    const std::vector<std::vector<double>>& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }

    /// Throws ModelLoadError.
    static std::unique_ptr<LinearClassifier> from_json(const nlohmann::json& j);

private:
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> bias_;
};

struct TrainOptions {
    int epochs = 200;
    double learning_rate = 0.1;
    std::size_t min_per_class = 10;
};

/// Per-sample gradient descent over a seeded shuffle each epoch; bitwise deterministic in
/// (corpus, seed). Throws InsufficientData when a class has fewer than min_per_class entries.
std::unique_ptr<LinearClassifier> train_classifier(const std::vector<corpus::CorpusEntry>& corpus,
                                                   std::uint64_t seed, const TrainOptions& opts = {});

Classification classify(const TypeClassifier& clf, std::string_view nlq);

/// Throws ModelLoadError for unreadable files, bad JSON, or unknown model versions.
std::unique_ptr<TypeClassifier> load_classifier(const std::filesystem::path& path);
void save_classifier(const TypeClassifier& clf, const std::filesystem::path& path);

}  // namespace nlstplan::nlu

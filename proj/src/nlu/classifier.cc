#include "nlstplan/nlu/classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nlstplan/error.h"
#include "nlstplan/nlu/tagger.h"

namespace nlstplan::nlu {

using nlohmann::json;

namespace {

std::array<double, kQueryTypeCount> softmax(const std::array<double, kQueryTypeCount>& z) {
    double mx = *std::max_element(z.begin(), z.end());
    std::array<double, kQueryTypeCount> p{};
    double sum = 0;
    for (std::size_t c = 0; c < kQueryTypeCount; ++c) {
        p[c] = std::exp(z[c] - mx);
        sum += p[c];
    }
    for (auto& v : p) v /= sum;
    return p;
}

std::size_t argmax(const std::array<double, kQueryTypeCount>& z) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kQueryTypeCount; ++c) {
        if (z[c] > z[best]) best = c;
    }
    return best;
}

}  // namespace

std::vector<std::string> features(std::string_view nlq) {
    std::vector<std::string> toks;
    for (const auto& t : tokenize(nlq)) {
        if (!t.text.empty() && std::isdigit(static_cast<unsigned char>(t.text.front()))) {
            toks.push_back(parse_time_token(t.text) ? "<time>" : "<num>");
        } else {
            toks.push_back(t.text);
        }
    }
    std::vector<std::string> out = toks;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) out.push_back(toks[i] + " " + toks[i + 1]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

LinearClassifier::LinearClassifier(std::vector<std::string> vocabulary, std::vector<std::vector<double>> weights,
                                   std::vector<double> bias)
    : vocab_(std::move(vocabulary)), weights_(std::move(weights)), bias_(std::move(bias)) {
    if (weights_.size() != kQueryTypeCount || bias_.size() != kQueryTypeCount) {
        throw Error(ErrorCode::ModelLoadError, "model needs one weight vector per query type");
    }
    for (const auto& w : weights_) {
        if (w.size() != vocab_.size()) throw Error(ErrorCode::ModelLoadError, "weight row does not match vocabulary");
    }
    for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
}

Classification LinearClassifier::classify(std::string_view nlq) const {
    std::array<double, kQueryTypeCount> z{};
    for (std::size_t c = 0; c < kQueryTypeCount; ++c) z[c] = bias_[c];
    for (const auto& f : features(nlq)) {
        auto it = index_.find(f);
        if (it == index_.end()) continue;
        for (std::size_t c = 0; c < kQueryTypeCount; ++c) z[c] += weights_[c][it->second];
    }
    Classification out;
    out.type = kAllQueryTypes[argmax(z)];
    out.scores = softmax(z);
    return out;
}

json LinearClassifier::to_json() const {
    json classes = json::array();
    for (QueryType t : kAllQueryTypes) classes.push_back(type_name(t));
    return json{{"version", kVersion}, {"classes", classes}, {"vocabulary", vocab_}, {"weights", weights_}, {"bias", bias_}};
}

std::unique_ptr<LinearClassifier> LinearClassifier::from_json(const json& j) {
    try {
        if (j.at("version").get<std::string>() != kVersion) {
            throw Error(ErrorCode::ModelLoadError, "unsupported model version " + j.at("version").dump());
        }
        auto classes = j.at("classes").get<std::vector<std::string>>();
        if (classes.size() != kQueryTypeCount) throw Error(ErrorCode::ModelLoadError, "model must list 7 classes");
        // rows may be stored in any class order; reorder to QueryType order
        auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
        auto bias = j.at("bias").get<std::vector<double>>();
        if (rows.size() != classes.size() || bias.size() != classes.size()) {
            throw Error(ErrorCode::ModelLoadError, "model class count mismatch");
        }
        std::vector<std::vector<double>> w(kQueryTypeCount);
        std::vector<double> b(kQueryTypeCount);
        std::set<QueryType> seen;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            auto t = parse_type(classes[i]);
            if (!t || !seen.insert(*t).second) throw Error(ErrorCode::ModelLoadError, "bad class " + classes[i]);
            w[static_cast<std::size_t>(*t)] = std::move(rows[i]);
            b[static_cast<std::size_t>(*t)] = bias[i];
        }
        return std::make_unique<LinearClassifier>(j.at("vocabulary").get<std::vector<std::string>>(), std::move(w),
                                                  std::move(b));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ModelLoadError, std::string("malformed model: ") + e.what());
    }
}

std::unique_ptr<LinearClassifier> train_classifier(const std::vector<corpus::CorpusEntry>& corpus, std::uint64_t seed,
                                                   const TrainOptions& opts) {
    std::array<std::size_t, kQueryTypeCount> per_class{};
    for (const auto& e : corpus) ++per_class[static_cast<std::size_t>(e.type)];
    for (std::size_t c = 0; c < kQueryTypeCount; ++c) {
        if (per_class[c] < opts.min_per_class) {
            throw Error(ErrorCode::InsufficientData, std::string(type_name(kAllQueryTypes[c])) + " has " +
                                                         std::to_string(per_class[c]) + " examples, need " +
                                                         std::to_string(opts.min_per_class));
        }
    }

    std::map<std::string, std::size_t> vocab_map;
    std::vector<std::vector<std::string>> raw;
    raw.reserve(corpus.size());
    for (const auto& e : corpus) {
        raw.push_back(features(e.nlq));
        for (const auto& f : raw.back()) vocab_map.emplace(f, 0);
    }
    std::vector<std::string> vocab;
    vocab.reserve(vocab_map.size());
    for (auto& [f, idx] : vocab_map) {
        idx = vocab.size();
        vocab.push_back(f);
    }
    std::vector<std::vector<std::size_t>> xs;
    xs.reserve(raw.size());
    for (const auto& fs : raw) {
        std::vector<std::size_t> x;
        for (const auto& f : fs) x.push_back(vocab_map.at(f));
        xs.push_back(std::move(x));
    }

    std::vector<std::vector<double>> w(kQueryTypeCount, std::vector<double>(vocab.size(), 0.0));
    std::vector<double> b(kQueryTypeCount, 0.0);
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t s : order) {
            std::array<double, kQueryTypeCount> z{};
            for (std::size_t c = 0; c < kQueryTypeCount; ++c) {
                z[c] = b[c];
                for (std::size_t f : xs[s]) z[c] += w[c][f];
            }
            auto p = softmax(z);
            const auto y = static_cast<std::size_t>(corpus[s].type);
            for (std::size_t c = 0; c < kQueryTypeCount; ++c) {
                double g = p[c] - (c == y ? 1.0 : 0.0);
                double step = opts.learning_rate * g;
                b[c] -= step;
                for (std::size_t f : xs[s]) w[c][f] -= step;
            }
        }
    }
    return std::make_unique<LinearClassifier>(std::move(vocab), std::move(w), std::move(b));
}

Classification classify(const TypeClassifier& clf, std::string_view nlq) { return clf.classify(nlq); }

std::unique_ptr<TypeClassifier> load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ModelLoadError, "cannot open model " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ModelLoadError, "model " + path.string() + " is not JSON: " + e.what());
    }
    return LinearClassifier::from_json(j);
}

void save_classifier(const TypeClassifier& clf, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
    out << clf.to_json().dump() << '\n';
}

}  // namespace nlstplan::nlu

#include "nlstplan/eval/eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "nlstplan/nlu/extract.h"
#include "nlstplan/planner/map.h"

namespace nlstplan::eval {

using nlohmann::json;

namespace {

void finish(EvalReport& r) {
    r.translatability = r.n ? static_cast<double>(r.translated) / static_cast<double>(r.n) : 0.0;
    r.precision = r.translated ? static_cast<double>(r.correct) / static_cast<double>(r.translated) : 0.0;
    if (r.response_ms.empty()) {
        r.mean_response_ms = r.p95_response_ms = 0;
        return;
    }
    r.mean_response_ms = std::accumulate(r.response_ms.begin(), r.response_ms.end(), 0.0) / static_cast<double>(r.response_ms.size());
    auto sorted = r.response_ms;
    std::sort(sorted.begin(), sorted.end());
    // nearest-rank percentile
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
    r.p95_response_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

EvalReport evaluate(const service::Engine& engine, const catalog::Database& db,
                    const std::vector<corpus::CorpusEntry>& entries, EvalOptions options) {
    EvalReport rep;
    for (const auto& e : entries) {
        auto& tc = rep.per_type[e.type];
        ++rep.n;
        ++tc.n;
        const auto t0 = std::chrono::steady_clock::now();
        auto resp = engine.query(db, e.nlq, options.optimize);
        rep.response_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        if (resp.error || !resp.result) {
            rep.failures.push_back({db.name(), e.nlq, e.type, "translation", resp.error ? resp.error->message : "no result"});
            continue;
        }
        ++rep.translated;
        ++tc.translated;
        try {
            auto truth = planner::map_query(e.type, nlu::from_slots(e.slots, db.kb()), db);
            if (planner::execute(truth, db).result == *resp.result) {
                ++rep.correct;
                ++tc.correct;
            } else {
                rep.failures.push_back({db.name(), e.nlq, e.type, "result",
                                        "got " + planner::render_plan(*resp.baseline) + " expected " + planner::render_plan(truth)});
            }
        } catch (const Error& err) {
            rep.failures.push_back({db.name(), e.nlq, e.type, "result", std::string("oracle: ") + err.what()});
        }
    }
    finish(rep);
    return rep;
}

EvalReport merge(const std::vector<EvalReport>& reports) {
    EvalReport out;
    for (const auto& r : reports) {
        out.n += r.n;
        out.translated += r.translated;
        out.correct += r.correct;
        for (const auto& [t, c] : r.per_type) {
            auto& o = out.per_type[t];
            o.n += c.n;
            o.translated += c.translated;
            o.correct += c.correct;
        }
        out.failures.insert(out.failures.end(), r.failures.begin(), r.failures.end());
        out.response_ms.insert(out.response_ms.end(), r.response_ms.begin(), r.response_ms.end());
    }
    finish(out);
    return out;
}

json EvalReport::to_json() const {
    json types = json::object();
    for (const auto& [t, c] : per_type) {
        types[std::string(type_name(t))] = {{"n", c.n}, {"translated", c.translated}, {"correct", c.correct}};
    }
    json fails = json::array();
    for (const auto& f : failures) {
        fails.push_back({{"db", f.db}, {"nlq", f.nlq}, {"expected_type", type_name(f.expected_type)}, {"stage", f.stage}, {"message", f.message}});
    }
    return {{"n", n},
            {"translated", translated},
            {"correct", correct},
            {"translatability", translatability},
            {"precision", precision},
            {"mean_response_ms", mean_response_ms},
            {"p95_response_ms", p95_response_ms},
            {"per_type", types},
            {"failures", fails}};
}

}  // namespace nlstplan::eval

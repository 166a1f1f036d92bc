#include "nlstplan/service/engine.h"

#include <chrono>
#include <cstdio>

#include "nlstplan/nlu/extract.h"
#include "nlstplan/nlu/tagger.h"
#include "nlstplan/optimizer/optimizer.h"
#include "nlstplan/planner/map.h"
#include "nlstplan/service/geojson.h"

namespace nlstplan::service {

using catalog::MatchKind;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

json rect_json(const std::optional<geo::Rect>& r) {
    if (!r || r->is_empty()) return nullptr;
    return json::array({r->xmin, r->ymin, r->xmax, r->ymax});
}

json spans_json(const nlu::CoarseTags& tags) {
    std::vector<const nlu::TaggedSpan*> all;
    for (const auto& s : tags.numbers) all.push_back(&s);
    for (const auto& s : tags.info) all.push_back(&s);
    std::sort(all.begin(), all.end(), [](const auto* a, const auto* b) { return a->begin < b->begin; });
    json out = json::array();
    for (const auto* s : all) {
        json j = {{"label", nlu::label_name(s->label)}, {"text", s->text}, {"begin", s->begin}, {"end", s->end}};
        if (s->label != nlu::Label::INFO) j["value"] = s->value;
        if (!s->unit.empty()) j["unit"] = s->unit;
        out.push_back(std::move(j));
    }
    return out;
}

std::string entity_name(const catalog::KnowledgeBase& kb, MatchKind kind, std::uint32_t index) {
    switch (kind) {
        case MatchKind::Relation: return kb.relations()[index].relation;
        case MatchKind::Location: return kb.locations()[index].name;
        case MatchKind::Object: return kb.objects()[index].name;
    }
    return {};
}

json extraction_json(const nlu::ExtractionResult& ex, const catalog::KnowledgeBase& kb) {
    json locs = json::array();
    for (auto i : ex.locations) locs.push_back(kb.locations()[i].name);
    json objs = json::array();
    for (auto i : ex.objects) objs.push_back(kb.objects()[i].name);
    json grounds = json::array();
    for (const auto& g : ex.groundings) {
        grounds.push_back({{"kind", catalog::match_kind_name(g.kind)},
                           {"name", entity_name(kb, g.kind, g.index)},
                           {"span", g.span},
                           {"score", g.score}});
    }
    json j = {{"relations", ex.relations}, {"locations", locs}, {"objects", objs}, {"nn", ex.nn}, {"groundings", grounds}};
    j["k"] = ex.k ? json(*ex.k) : json(nullptr);
    j["distance_m"] = ex.distance ? json(ex.distance->meters()) : json(nullptr);
    j["period"] = ex.period ? json::array({ex.period->start().ms, ex.period->end().ms}) : json(nullptr);
    j["agg"] = ex.agg ? json(*ex.agg) : json(nullptr);
    j["predicate"] = ex.predicate ? json(*ex.predicate) : json(nullptr);
    return j;
}

json classification_json(const nlu::Classification& c) {
    json scores = json::object();
    for (std::size_t i = 0; i < kQueryTypeCount; ++i) scores[std::string(type_name(kAllQueryTypes[i]))] = c.scores[i];
    return {{"type", type_name(c.type)}, {"scores", scores}};
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string error_category(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownEntity:
        case ErrorCode::AmbiguousEntity: return "entity";
        case ErrorCode::MissingSlot:
        case ErrorCode::InvalidPeriod:
        case ErrorCode::PlanSyntaxError:
        case ErrorCode::EmptyInput: return "syntax";
        default: return "unsupported-type";
    }
}

std::string QueryResponse::plan_id() const {
    if (!plan) return {};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(db + "\n" + planner::render_plan(*plan))));
    return buf;
}

json QueryResponse::to_json() const {
    json j = {{"db", db}, {"nlq", nlq}, {"trace", trace}, {"warnings", warnings}};
    if (type) j["query_type"] = type_name(*type);
    if (plan) {
        j["plan_id"] = plan_id();
        j["plan_text"] = planner::render_plan(*plan);
        j["operator_tree"] = planner::plan_tree(*plan);
    }
    if (baseline) j["baseline_plan_text"] = planner::render_plan(*baseline);
    if (optimizer) j["optimizer"] = *optimizer;
    if (error) {
        json e = {{"category", error->category}, {"code", error->code}, {"message", error->message},
                  {"suggestions", error->suggestions}};
        if (error->span) e["span"] = *error->span;
        j["error"] = std::move(e);
    } else if (result) {
        json rows = planner::rows_json(*result);
        rows["count"] = result->rows.size();
        j["results"] = {{"geojson", to_geojson(*result)}, {"table", rows}};
        j["timing"] = {{"translation_ms", translation_ms},
                       {"baseline_ms", baseline_ms},
                       {"optimized_ms", optimized_ms ? json(*optimized_ms) : json(nullptr)}};
    }
    return j;
}

Engine::Engine(std::vector<catalog::Database> databases, std::unique_ptr<nlu::TypeClassifier> classifier,
               EngineOptions options)
    : dbs_(std::move(databases)), clf_(std::move(classifier)), opts_(options) {
    if (!clf_) throw Error(ErrorCode::ModelLoadError, "engine needs a classifier");
    for (const auto& db : dbs_) {
        std::vector<corpus::CorpusEntry> ex;
        try {
            ex = corpus::generate(db, 5 * kQueryTypeCount, opts_.seed);
        } catch (const Error&) {
            // databases that cannot instantiate every type still get served; no examples then
        }
        examples_.emplace(db.name(), std::move(ex));
    }
}

const catalog::Database* Engine::find(std::string_view name) const {
    for (const auto& db : dbs_) {
        if (db.name() == name) return &db;
    }
    return nullptr;
}

std::vector<std::string> Engine::examples(const catalog::Database& db, std::optional<QueryType> type, std::size_t n) const {
    std::vector<std::string> out;
    auto it = examples_.find(db.name());
    if (it == examples_.end()) return out;
    for (const auto& e : it->second) {
        if (out.size() >= n) break;
        if (!type || e.type == *type) out.push_back(e.nlq);
    }
    return out;
}

QueryResponse Engine::query(const catalog::Database& db, std::string_view nlq, bool optimize) const {
    QueryResponse r;
    r.db = db.name();
    r.nlq = std::string(nlq);
    r.trace = {{"tokens", json::array()}, {"tagged_spans", json::array()}, {"extraction", nullptr}, {"classification", nullptr}};
    const auto t0 = Clock::now();
    try {
        nlu::CoarseTags tags = nlu::coarse_tag(nlq);
        for (const auto& t : tags.tokens) r.trace["tokens"].push_back(t.text);
        r.trace["tagged_spans"] = spans_json(tags);
        nlu::ExtractionResult ex = nlu::fine_extract(tags, db.kb());
        r.trace["extraction"] = extraction_json(ex, db.kb());
        nlu::Classification cls = clf_->classify(nlq);
        r.trace["classification"] = classification_json(cls);
        r.type = cls.type;
        r.baseline = planner::map_query(cls.type, ex, db, &r.warnings);
        r.plan = r.baseline;
        if (optimize) {
            double sel = optimizer::plan_selectivity(*r.baseline, db, opts_.selectivity_sample, opts_.seed);
            auto cands = optimizer::enumerate_candidates(*r.baseline, db, sel);
            auto choice = optimizer::choose_plan(cands, db, opts_.sample_fraction, opts_.seed);
            r.plan = choice.plan;
            json report = optimizer::report_json(choice);
            report["selectivity"] = sel;
            r.optimizer = std::move(report);
        }
        r.translation_ms = ms_since(t0);

        auto base = planner::execute(*r.baseline, db);
        r.baseline_ms = base.elapsed_ms;
        if (optimize) {
            if (*r.plan == *r.baseline) {
                r.optimized_ms = base.elapsed_ms;
            } else {
                auto opt = planner::execute(*r.plan, db);
                r.optimized_ms = opt.elapsed_ms;
                if (!(opt.result == base.result)) throw Error(ErrorCode::ExecError, "optimized plan changed the result");
            }
        }
        r.result = std::move(base.result);
    } catch (const EntityError& e) {
        ErrorInfo info{error_category(e.code()), std::string(error_code_name(e.code())), e.what(), e.suggestions(), e.span()};
        if (info.suggestions.size() > 3) info.suggestions.resize(3);
        for (auto& ex : examples(db, std::nullopt, 3 - info.suggestions.size())) info.suggestions.push_back(std::move(ex));
        r.error = std::move(info);
    } catch (const Error& e) {
        ErrorInfo info{error_category(e.code()), std::string(error_code_name(e.code())), e.what(), {}, std::nullopt};
        info.suggestions = examples(db, info.category == "syntax" ? r.type : std::nullopt, 3);
        r.error = std::move(info);
    }
    if (r.error) r.result.reset();
    return r;
}

std::vector<corpus::CorpusEntry> default_training_corpus(const std::vector<catalog::Database>& dbs, std::uint64_t seed) {
    std::vector<corpus::CorpusEntry> out;
    for (const auto& db : dbs) {
        auto part = corpus::generate(db, 100 * kQueryTypeCount, seed);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::unique_ptr<nlu::TypeClassifier> load_or_train(const std::optional<std::filesystem::path>& model,
                                                   const std::vector<catalog::Database>& dbs, std::uint64_t seed) {
    if (model) return nlu::load_classifier(*model);
    return nlu::train_classifier(default_training_corpus(dbs, seed), seed);
}

json knowledge_json(const catalog::Database& db, std::string_view q) {
    const auto& kb = db.kb();
    json out = json::array();
    for (const auto& m : kb.lookup(q)) {
        json j = {{"kind", catalog::match_kind_name(m.kind)},
                  {"name", entity_name(kb, m.kind, m.index)},
                  {"score", m.score},
                  {"surface", m.surface}};
        switch (m.kind) {
            case MatchKind::Relation: {
                const auto& e = kb.relations()[m.index];
                j["relation"] = e.relation;
                std::optional<geo::Rect> mbr;
                for (const auto& x : db.stats(e.relation).extents) {
                    if (x.rect) {
                        mbr = x.rect;
                        break;
                    }
                }
                j["mbr"] = rect_json(mbr);
                break;
            }
            case MatchKind::Location: {
                const auto& e = kb.locations()[m.index];
                j["relation"] = e.relation;
                j["geometry_kind"] = catalog::kind_name(e.kind);
                j["mbr"] = rect_json(geo::bbox(e.geometry));
                break;
            }
            case MatchKind::Object: {
                const auto& e = kb.objects()[m.index];
                const auto& rel = db.relation(e.relation);
                j["relation"] = e.relation;
                j["mbr"] = rect_json(rel.tuple(e.tuple)[rel.attr(e.attribute)].bbox());
                break;
            }
        }
        out.push_back(std::move(j));
    }
    return out;
}

json databases_json(const std::vector<catalog::Database>& dbs) {
    json out = json::array();
    for (const auto& db : dbs) {
        json rels = json::array();
        for (std::size_t i = 0; i < db.declared_count(); ++i) {
            const auto& r = db.relations()[i];
            json attrs = json::array();
            for (const auto& a : r.attributes()) {
                attrs.push_back({{"name", a.name}, {"kind", catalog::kind_name(a.kind)}, {"indexed", a.indexed}});
            }
            const auto& st = db.stats(r.name());
            json extents = json::array();
            for (const auto& e : st.extents) {
                json x = {{"attribute", e.attribute}, {"kind", catalog::kind_name(e.kind)}, {"mbr", rect_json(e.rect)}};
                x["period"] = e.period ? json::array({e.period->start().ms, e.period->end().ms}) : json(nullptr);
                extents.push_back(std::move(x));
            }
            json jr = {{"name", r.name()}, {"attributes", attrs}, {"stats", {{"tuple_count", st.tuple_count}, {"extents", extents}}}};
            if (auto c = db.companion_of(r.name())) jr["companion"] = *c;
            rels.push_back(std::move(jr));
        }
        json aliases = json::object();
        for (const auto& [a, c] : db.aliases()) aliases[a] = c;
        out.push_back({{"name", db.name()}, {"relations", rels}, {"aliases", aliases}});
    }
    return out;
}

}  // namespace nlstplan::service

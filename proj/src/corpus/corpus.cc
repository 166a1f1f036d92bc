#include "nlstplan/corpus/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nlstplan/corpus/words.h"
#include "nlstplan/error.h"
#include "nlstplan/geo/wkt.h"

namespace nlstplan {

namespace {
constexpr std::array<std::string_view, kQueryTypeCount> kTypeNames{
    "BasicSpatial", "TimeInterval", "Range", "NearestNeighbor", "Join", "Similarity", "Aggregation"};
}

std::string_view type_name(QueryType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

std::optional<QueryType> parse_type(std::string_view name) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) return static_cast<QueryType>(i);
    }
    return std::nullopt;
}

}  // namespace nlstplan

namespace nlstplan::corpus {

namespace detail {
extern const std::string_view kBundledTemplates;
}

using nlohmann::json;
using catalog::AttrKind;
using catalog::Database;
using catalog::KnowledgeBase;
using catalog::MatchKind;

namespace {

constexpr std::string_view kOpen = "\xE2\x9F\xA8";   // U+27E8
constexpr std::string_view kClose = "\xE2\x9F\xA9";  // U+27E9

constexpr int kKChoices[] = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 15, 20, 50};
constexpr double kDistanceChoices[] = {100, 150, 200, 250, 300, 400, 500, 750, 1000, 1500, 2000};

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto p = s.find(sep, start);
        out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) return out;
        start = p + 1;
    }
}

std::vector<PatternPart> parse_pattern(const std::string& pattern, const std::string& id) {
    std::vector<PatternPart> parts;
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        auto open = pattern.find(kOpen, pos);
        if (open == std::string::npos) {
            parts.push_back({pattern.substr(pos), false, 0, {}});
            break;
        }
        if (open > pos) parts.push_back({pattern.substr(pos, open - pos), false, 0, {}});
        auto close = pattern.find(kClose, open);
        if (close == std::string::npos) throw Error(ErrorCode::InvalidArgument, id + ": unterminated slot");
        auto fields = split(pattern.substr(open + kOpen.size(), close - open - kOpen.size()), ':');
        PatternPart part{fields[0], true, 1, {}};
        if (!is_slot_name(part.text)) throw Error(ErrorCode::InvalidArgument, id + ": unknown slot '" + part.text + "'");
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (!fields[i].empty() && std::isdigit(static_cast<unsigned char>(fields[i][0]))) {
                part.position = std::stoi(fields[i]);
            } else {
                part.modifier = fields[i];
            }
        }
        parts.push_back(std::move(part));
        pos = close + kClose.size();
    }
    return parts;
}

std::string format_distance(double meters, const std::string& modifier) {
    if (modifier == "km") return geo::format_number(meters / 1000) + " km";
    if (modifier == "meters") return geo::format_number(meters) + " meters";
    return geo::format_number(meters) + " m";
}

std::string format_period(const geo::Period& p, const std::string& modifier) {
    if (modifier == "from") {
        return "from " + words::format_time(p.start().ms, true) + " to " + words::format_time(p.end().ms, true);
    }
    return "between " + words::format_time(p.start().ms, false) + " and " + words::format_time(p.end().ms, false);
}

/// Kind a relation offers to templates: its first spatial attribute, else moving.
std::string relation_kind(const catalog::Relation& r) {
    if (auto s = r.first_spatial()) return std::string(catalog::kind_name(r.attributes()[*s].kind));
    if (r.first_of(AttrKind::MPoint)) return "moving";
    return "none";
}

bool kind_matches(const std::string& want, const catalog::Relation& r) {
    const std::string have = relation_kind(r);
    if (want == "any") return true;
    if (want == "moving") return r.first_of(AttrKind::MPoint).has_value();
    if (want == "spatial") return have == "point" || have == "line" || have == "region";
    if (want == "extent") return have == "line" || have == "region";
    return want == have;
}

bool location_matches(const std::string& want, AttrKind kind) {
    return want == "any" || want == catalog::kind_name(kind);
}

std::size_t find_ci(const std::string& hay, const std::string& needle) {
    return catalog::to_lower(hay).find(catalog::to_lower(needle));
}

bool replace_ci(std::string& text, const std::string& from, const std::string& to) {
    auto p = find_ci(text, from);
    if (p == std::string::npos) return false;
    text.replace(p, from.size(), to);
    return true;
}

/// Candidate entities per database, shared by every draw.
struct Pools {
    std::vector<const catalog::Relation*> relations;
    std::vector<const catalog::LocationKBEntry*> locations;
    std::vector<const catalog::ObjectKBEntry*> objects;
};

Pools make_pools(const Database& db) {
    const KnowledgeBase& kb = db.kb();
    std::map<std::string, int> counts;
    for (const auto& r : kb.relations()) {
        for (const auto& a : r.aliases) ++counts[catalog::to_lower(a)];
    }
    for (const auto& l : kb.locations()) ++counts[catalog::to_lower(l.name)];
    for (const auto& o : kb.objects()) ++counts[catalog::to_lower(o.name)];
    Pools p;
    for (std::size_t i = 0; i < db.declared_count(); ++i) p.relations.push_back(&db.relations()[i]);
    for (const auto& l : kb.locations()) {
        if (counts[catalog::to_lower(l.name)] == 1) p.locations.push_back(&l);
    }
    for (const auto& o : kb.objects()) {
        if (counts[catalog::to_lower(o.name)] == 1) p.objects.push_back(&o);
    }
    return p;
}

/// Relation assignment for the template's relation slots, or empty when impossible.
std::vector<const catalog::Relation*> draw_relations(const NLQTemplate& t, const Pools& pools, std::mt19937_64* rng) {
    std::vector<const catalog::Relation*> chosen;
    for (const auto& kind : t.relation_kinds) {
        std::vector<const catalog::Relation*> options;
        for (const auto* r : pools.relations) {
            if (!kind_matches(kind, *r)) continue;
            if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
            if (t.object && kind == "moving") {
                bool has_object = std::any_of(pools.objects.begin(), pools.objects.end(),
                                              [&](const auto* o) { return o->relation == r->name(); });
                if (!has_object) continue;
            }
            options.push_back(r);
        }
        if (options.empty()) return {};
        chosen.push_back(rng ? options[pick(*rng, options.size())] : options.front());
    }
    return chosen;
}

bool feasible(const NLQTemplate& t, const Pools& pools) {
    // exhaustive over first choices is enough for the small relation sets involved
    std::vector<std::size_t> idx(t.relation_kinds.size(), 0);
    std::function<bool(std::size_t, std::vector<const catalog::Relation*>&)> rec =
        [&](std::size_t slot, std::vector<const catalog::Relation*>& chosen) -> bool {
        if (slot == t.relation_kinds.size()) return true;
        for (const auto* r : pools.relations) {
            if (!kind_matches(t.relation_kinds[slot], *r)) continue;
            if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
            chosen.push_back(r);
            if (rec(slot + 1, chosen)) return true;
            chosen.pop_back();
        }
        return false;
    };
    std::vector<const catalog::Relation*> chosen;
    if (!rec(0, chosen)) return false;
    if (!t.location_kind.empty()) {
        bool any = std::any_of(pools.locations.begin(), pools.locations.end(),
                               [&](const auto* l) { return location_matches(t.location_kind, l->kind); });
        if (!any) return false;
    }
    if (t.object && pools.objects.empty()) return false;
    return true;
}

geo::Period draw_period(std::mt19937_64& rng) {
    constexpr std::int64_t half_hour = 30 * 60 * 1000;
    std::int64_t start = 10 + static_cast<std::int64_t>(pick(rng, 27));  // 05:00 .. 18:00
    std::int64_t len = 2 + static_cast<std::int64_t>(pick(rng, 9));     // 1h .. 5h
    return geo::Period(start * half_hour, (start + len) * half_hour);
}

struct Draw {
    std::string nlq;
    Slots slots;
};

std::optional<Draw> instantiate(const NLQTemplate& t, const Pools& pools, std::mt19937_64& rng) {
    Draw d;
    auto rels = draw_relations(t, pools, &rng);
    if (rels.size() != t.relation_kinds.size()) return std::nullopt;

    const catalog::ObjectKBEntry* object = nullptr;
    if (t.object) {
        std::vector<const catalog::ObjectKBEntry*> options;
        const catalog::Relation* owner = nullptr;
        for (std::size_t i = 0; i < rels.size(); ++i) {
            if (t.relation_kinds[i] == "moving") owner = rels[i];
        }
        for (const auto* o : pools.objects) {
            if (!owner || o->relation == owner->name()) options.push_back(o);
        }
        if (options.empty()) return std::nullopt;
        object = options[pick(rng, options.size())];
    }
    const catalog::LocationKBEntry* location = nullptr;
    if (!t.location_kind.empty()) {
        std::vector<const catalog::LocationKBEntry*> options;
        for (const auto* l : pools.locations) {
            if (location_matches(t.location_kind, l->kind)) options.push_back(l);
        }
        if (options.empty()) return std::nullopt;
        location = options[pick(rng, options.size())];
    }
    if (t.uses("k")) d.slots.k = kKChoices[pick(rng, std::size(kKChoices))];
    if (t.uses("distance")) d.slots.distance = kDistanceChoices[pick(rng, std::size(kDistanceChoices))];
    if (t.uses("period")) d.slots.period = draw_period(rng);

    for (const auto* r : rels) d.slots.relations.push_back(r->name());
    if (location) d.slots.location = location->name;
    if (object) d.slots.object = object->name;
    d.slots.agg = t.fixed_agg;
    d.slots.predicate = t.fixed_predicate;

    for (const auto& part : t.parts) {
        if (!part.slot) {
            d.nlq += part.text;
        } else if (part.text == "relation") {
            const std::string& name = rels.at(static_cast<std::size_t>(part.position - 1))->name();
            d.nlq += part.modifier == "sg" ? words::singular(name) : name;
        } else if (part.text == "location") {
            d.nlq += location->name;
        } else if (part.text == "object") {
            d.nlq += part.modifier == "raw" ? object->name : words::split_trailing_number(object->name);
        } else if (part.text == "k") {
            d.nlq += part.modifier == "word" ? *words::number_to_words(*d.slots.k) : std::to_string(*d.slots.k);
        } else if (part.text == "distance") {
            d.nlq += format_distance(*d.slots.distance, part.modifier);
        } else if (part.text == "period") {
            d.nlq += format_period(*d.slots.period, part.modifier);
        }
    }
    return d;
}

}  // namespace

bool is_slot_name(std::string_view name) {
    return name == "relation" || name == "object" || name == "location" || name == "k" || name == "distance" ||
           name == "period";
}

bool NLQTemplate::uses(std::string_view slot) const {
    return std::any_of(parts.begin(), parts.end(), [&](const PatternPart& p) { return p.slot && p.text == slot; });
}

json to_json(const Slots& s) {
    json j = json::object();
    if (!s.relations.empty()) j["relation"] = s.relations;
    if (s.location) j["location"] = *s.location;
    if (s.object) j["object"] = *s.object;
    if (s.k) j["k"] = *s.k;
    if (s.distance) j["distance"] = *s.distance;
    if (s.period) j["period"] = json::array({s.period->start().ms, s.period->end().ms});
    if (s.agg) j["agg"] = *s.agg;
    if (s.predicate) j["predicate"] = *s.predicate;
    return j;
}

Slots slots_from_json(const json& j) {
    try {
        Slots s;
        if (j.contains("relation")) {
            if (j["relation"].is_string()) {
                s.relations.push_back(j["relation"].get<std::string>());
            } else {
                s.relations = j["relation"].get<std::vector<std::string>>();
            }
        }
        if (j.contains("location")) s.location = j["location"].get<std::string>();
        if (j.contains("object")) s.object = j["object"].get<std::string>();
        if (j.contains("k")) s.k = j["k"].get<int>();
        if (j.contains("distance")) s.distance = j["distance"].get<double>();
        if (j.contains("period")) s.period = geo::Period(j["period"].at(0).get<std::int64_t>(), j["period"].at(1).get<std::int64_t>());
        if (j.contains("agg")) s.agg = j["agg"].get<std::string>();
        if (j.contains("predicate")) s.predicate = j["predicate"].get<std::string>();
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad slots: ") + e.what());
    }
}

json to_json(const CorpusEntry& e) {
    return json{{"nlq", e.nlq}, {"type", type_name(e.type)}, {"slots", to_json(e.slots)}};
}

CorpusEntry entry_from_json(const json& j) {
    if (!j.is_object() || !j.contains("nlq") || !j.contains("type")) {
        throw Error(ErrorCode::InvalidArgument, "corpus entry needs nlq and type");
    }
    auto type = parse_type(j["type"].get<std::string>());
    if (!type) throw Error(ErrorCode::InvalidArgument, "unknown query type " + j["type"].dump());
    return CorpusEntry{j["nlq"].get<std::string>(), *type, slots_from_json(j.value("slots", json::object()))};
}

TemplateBank TemplateBank::parse(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("template bank: ") + e.what());
    }
    TemplateBank bank;
    for (const auto& jt : doc.at("templates")) {
        NLQTemplate t;
        t.id = jt.at("id").get<std::string>();
        auto type = parse_type(jt.at("type").get<std::string>());
        if (!type) throw Error(ErrorCode::InvalidArgument, t.id + ": unknown type");
        t.type = *type;
        t.group = jt.value("group", t.id);
        t.pattern = jt.at("pattern").get<std::string>();
        t.parts = parse_pattern(t.pattern, t.id);
        t.relation_kinds = jt.value("relations", std::vector<std::string>{});
        t.location_kind = jt.value("location", std::string{});
        t.object = jt.value("object", false);
        if (jt.contains("fixed")) {
            const auto& f = jt["fixed"];
            if (f.contains("agg")) t.fixed_agg = f["agg"].get<std::string>();
            if (f.contains("predicate")) t.fixed_predicate = f["predicate"].get<std::string>();
        }
        int max_rel = 0;
        for (const auto& p : t.parts) {
            if (p.slot && p.text == "relation") max_rel = std::max(max_rel, p.position);
        }
        if (static_cast<std::size_t>(max_rel) != t.relation_kinds.size()) {
            throw Error(ErrorCode::InvalidArgument, t.id + ": relation slots and kinds disagree");
        }
        if (t.uses("location") == t.location_kind.empty() || t.uses("object") != t.object) {
            throw Error(ErrorCode::InvalidArgument, t.id + ": slot constraints disagree with pattern");
        }
        bank.templates_.push_back(std::move(t));
    }
    return bank;
}

TemplateBank TemplateBank::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const TemplateBank& TemplateBank::bundled() {
    static const TemplateBank bank = parse(detail::kBundledTemplates);
    return bank;
}

std::vector<const NLQTemplate*> TemplateBank::of_type(QueryType t) const {
    std::vector<const NLQTemplate*> out;
    for (const auto& x : templates_) {
        if (x.type == t) out.push_back(&x);
    }
    return out;
}

std::vector<CorpusEntry> generate(const Database& db, std::size_t n, std::uint64_t seed, const TemplateBank& bank) {
    if (n == 0) return {};
    const Pools pools = make_pools(db);
    std::map<QueryType, std::vector<const NLQTemplate*>> usable;
    for (QueryType t : kAllQueryTypes) {
        for (const auto* tpl : bank.of_type(t)) {
            if (feasible(*tpl, pools)) usable[t].push_back(tpl);
        }
        if (usable[t].empty()) {
            throw Error(ErrorCode::NoTemplates, "no usable template for " + std::string(type_name(t)) + " on " + db.name());
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<QueryType> types;
    types.reserve(n);
    for (std::size_t i = 0; i < n; ++i) types.push_back(kAllQueryTypes[i % kQueryTypeCount]);
    shuffle(types, rng);

    std::set<std::string> seen;
    std::vector<CorpusEntry> out;
    out.reserve(n);
    for (QueryType t : types) {
        const auto& tpls = usable[t];
        std::optional<Draw> draw;
        for (int attempt = 0; attempt < 200; ++attempt) {
            auto d = instantiate(*tpls[pick(rng, tpls.size())], pools, rng);
            if (!d) continue;
            draw = std::move(d);
            if (!seen.count(draw->nlq)) break;
        }
        if (!draw) throw Error(ErrorCode::NoTemplates, "could not instantiate a " + std::string(type_name(t)) + " template");
        seen.insert(draw->nlq);
        out.push_back({std::move(draw->nlq), t, std::move(draw->slots)});
    }
    return out;
}

RepairResult validate_repair(const CorpusEntry& entry, const KnowledgeBase& kb) {
    RepairResult res{entry, false};
    auto best = [&](const std::string& name, MatchKind kind) -> std::optional<catalog::KBMatch> {
        for (const auto& m : kb.lookup(name)) {
            if (m.kind == kind) return m;
        }
        return std::nullopt;
    };
    auto fail = [&](const std::string& what) {
        auto sugg = kb.suggest(what, 3);
        std::vector<std::string> names;
        for (const auto& s : sugg) names.push_back(s.surface);
        throw EntityError(ErrorCode::Unrepairable, what, names, "cannot repair entity '" + what + "'");
    };

    for (auto& rel : res.entry.slots.relations) {
        auto m = best(rel, MatchKind::Relation);
        if (!m) fail(rel);
        const std::string& good = kb.relations()[m->index].relation;
        if (m->score == 1.0 && good == rel) continue;
        if (!replace_ci(res.entry.nlq, rel, good)) replace_ci(res.entry.nlq, words::singular(rel), words::singular(good));
        rel = good;
        res.repaired = true;
    }
    if (auto& loc = res.entry.slots.location) {
        auto m = best(*loc, MatchKind::Location);
        if (!m) fail(*loc);
        const std::string& good = kb.locations()[m->index].name;
        if (!(m->score == 1.0 && good == *loc)) {
            replace_ci(res.entry.nlq, *loc, good);
            loc = good;
            res.repaired = true;
        }
    }
    if (auto& obj = res.entry.slots.object) {
        auto m = best(*obj, MatchKind::Object);
        if (!m) fail(*obj);
        const std::string& good = kb.objects()[m->index].name;
        if (!(m->score == 1.0 && good == *obj)) {
            if (!replace_ci(res.entry.nlq, words::split_trailing_number(*obj), words::split_trailing_number(good))) {
                replace_ci(res.entry.nlq, *obj, good);
            }
            obj = good;
            res.repaired = true;
        }
    }
    return res;
}

std::vector<CorpusEntry> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
    std::vector<CorpusEntry> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(entry_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, path.filename().string() + " line " + std::to_string(row) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
    for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

}  // namespace nlstplan::corpus

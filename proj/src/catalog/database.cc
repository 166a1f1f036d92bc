#include "nlstplan/catalog/database.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nlstplan/error.h"
#include "nlstplan/geo/wkt.h"

namespace nlstplan::catalog {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::string row_prefix(const std::string& file, std::size_t row) {
    return file + " row " + std::to_string(row) + ": ";
}

Relation read_relation(const std::filesystem::path& path, std::string name, std::vector<AttributeDef> attrs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingCatalog, "missing relation file " + path.string());
    const std::string file = path.filename().string();
    Relation rel(std::move(name), attrs);

    std::string line;
    std::size_t row = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            auto cols = split_tabs(line);
            bool ok = cols.size() == attrs.size();
            for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = cols[i] == attrs[i].name;
            if (!ok) throw Error(ErrorCode::SchemaMismatch, row_prefix(file, row) + "header does not match catalog");
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() != attrs.size()) {
            throw Error(ErrorCode::SchemaMismatch, row_prefix(file, row) + "expected " + std::to_string(attrs.size()) +
                                                       " values, got " + std::to_string(cells.size()));
        }
        Tuple t;
        t.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const AttrKind k = attrs[i].kind;
            try {
                t.push_back(parse_value(k, cells[i]));
            } catch (const Error& e) {
                bool geometric = is_spatial(k) || k == AttrKind::MPoint;
                throw Error(geometric ? ErrorCode::BadGeometry : ErrorCode::SchemaMismatch,
                            row_prefix(file, row) + attrs[i].name + ": " + e.what());
            }
        }
        rel.add(std::move(t));
    }
    if (header) throw Error(ErrorCode::SchemaMismatch, file + " row 1: missing header");
    return rel;
}

/// `trip` -> `UTrip`
std::string unit_attr_name(const std::string& attr) {
    std::string out = "U" + attr;
    if (out.size() > 1) out[1] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[1])));
    return out;
}

Relation build_companion(const Relation& r, std::size_t mp) {
    auto attrs = r.attributes();
    attrs[mp].name = unit_attr_name(attrs[mp].name);
    Relation out(r.name() + std::string(kUTOrderedSuffix), attrs);
    std::vector<std::size_t> order(r.size());
    std::iota(order.begin(), order.end(), 0);
    auto first_start = [&](std::size_t i) {
        const auto& m = r.tuples()[i][mp].as_mpoint();
        return m.empty() ? INT64_MAX : m.units().front().period.start().ms;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first_start(a) < first_start(b); });
    for (auto i : order) out.add(r.tuples()[i]);
    return out;
}

json rect_json(const geo::Rect& r) { return json::array({r.xmin, r.ymin, r.xmax, r.ymax}); }

}  // namespace

RelationStats compute_stats(const Relation& r) {
    RelationStats s{r.name(), r.size(), {}};
    if (r.size() == 0) return s;
    for (std::size_t a = 0; a < r.attributes().size(); ++a) {
        const AttributeDef& def = r.attributes()[a];
        AttrExtent e{def.name, def.kind, std::nullopt, std::nullopt};
        if (is_spatial(def.kind) || def.kind == AttrKind::MPoint) {
            geo::Rect box = geo::Rect::empty();
            for (const auto& t : r.tuples()) {
                if (auto b = t[a].bbox()) box.extend(*b);
            }
            if (!box.is_empty()) e.rect = box;
        }
        if (def.kind == AttrKind::MPoint || def.kind == AttrKind::Instant || def.kind == AttrKind::Period) {
            std::int64_t lo = INT64_MAX, hi = INT64_MIN;
            for (const auto& t : r.tuples()) {
                if (def.kind == AttrKind::MPoint) {
                    const auto& u = t[a].as_mpoint().units();
                    if (u.empty()) continue;
                    lo = std::min(lo, u.front().period.start().ms);
                    hi = std::max(hi, u.back().period.end().ms);
                } else if (def.kind == AttrKind::Instant) {
                    lo = std::min(lo, t[a].as_instant().ms);
                    hi = std::max(hi, t[a].as_instant().ms + 1);
                } else {
                    lo = std::min(lo, t[a].as_period().start().ms);
                    hi = std::max(hi, t[a].as_period().end().ms);
                }
            }
            if (lo < hi) e.period = geo::Period(lo, hi);
        }
        if (e.rect || e.period) s.extents.push_back(std::move(e));
    }
    return s;
}

Database::Database(std::string name, std::vector<Relation> relations) : name_(std::move(name)) {
    declared_ = relations.size();
    relations_ = std::move(relations);
    std::vector<std::string> moving;
    for (std::size_t i = 0; i < declared_; ++i) {
        if (auto mp = relations_[i].first_of(AttrKind::MPoint)) {
            relations_.push_back(build_companion(relations_[i], *mp));
            moving.push_back(relations_.back().name());
        }
    }
    for (std::size_t i = 0; i < relations_.size(); ++i) {
        relations_[i].build_indexes();
        if (!by_name_.emplace(relations_[i].name(), i).second) {
            throw Error(ErrorCode::SchemaMismatch, "duplicate relation '" + relations_[i].name() + "'");
        }
        stats_.emplace(relations_[i].name(), compute_stats(relations_[i]));
    }
    if (moving.size() == 1 && !by_name_.count(kUTOrderedAlias)) aliases_.emplace(kUTOrderedAlias, moving.front());
    kb_ = build_kb(*this);
}

bool Database::is_companion(std::string_view relation) const {
    auto it = by_name_.find(relation);
    return it != by_name_.end() && it->second >= declared_;
}

const Relation* Database::find(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return &relations_[it->second];
    auto al = aliases_.find(std::string(name));
    if (al != aliases_.end()) return find(al->second);
    return nullptr;
}

const Relation& Database::relation(std::string_view name) const {
    if (const Relation* r = find(name)) return *r;
    throw Error(ErrorCode::UnknownRelation, "unknown relation '" + std::string(name) + "' in " + name_);
}

std::string Database::canonical(std::string_view name) const { return relation(name).name(); }

std::optional<std::string> Database::companion_of(std::string_view relation) const {
    std::string c = std::string(relation) + std::string(kUTOrderedSuffix);
    if (by_name_.count(c)) return c;
    return std::nullopt;
}

const RelationStats& Database::stats(std::string_view relation) const {
    auto it = stats_.find(canonical(relation));
    return it->second;
}

Database Database::sample(double fraction, std::uint64_t seed, std::size_t min_tuples) const {
    if (!(fraction > 0 && fraction <= 1)) throw Error(ErrorCode::InvalidArgument, "sample fraction must be in (0, 1]");
    std::mt19937_64 rng(seed);
    std::vector<Relation> out;
    for (std::size_t i = 0; i < declared_; ++i) {
        const Relation& r = relations_[i];
        const std::size_t n = r.size();
        std::size_t m = std::max(min_tuples, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
        std::vector<std::size_t> ids(n);
        std::iota(ids.begin(), ids.end(), 0);
        if (m < n) {
            // partial Fisher-Yates, then restore tuple order
            for (std::size_t j = 0; j < m; ++j) {
                std::uniform_int_distribution<std::size_t> pick(j, n - 1);
                std::swap(ids[j], ids[pick(rng)]);
            }
            ids.resize(m);
            std::sort(ids.begin(), ids.end());
        }
        Relation s(r.name(), r.attributes());
        for (auto id : ids) s.add(r.tuples()[id]);
        out.push_back(std::move(s));
    }
    return Database(name_, std::move(out));
}

Database load_dataset(const std::filesystem::path& dir) {
    const auto cat_path = dir / "catalog.json";
    std::ifstream in(cat_path);
    if (!in) throw Error(ErrorCode::MissingCatalog, "no catalog.json in " + dir.string());
    json cat;
    try {
        in >> cat;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MissingCatalog, "unreadable catalog.json: " + std::string(e.what()));
    }
    try {
        std::vector<Relation> rels;
        for (const auto& r : cat.at("relations")) {
            std::vector<AttributeDef> attrs;
            for (const auto& a : r.at("attributes")) {
                attrs.push_back({a.at("name").get<std::string>(), parse_kind(a.at("kind").get<std::string>()),
                                 a.value("indexed", false)});
            }
            const std::string name = r.at("name").get<std::string>();
            const std::string file = r.value("file", name + ".tsv");
            rels.push_back(read_relation(dir / file, name, std::move(attrs)));
        }
        std::string db_name = cat.value("name", dir.filename().string());
        return Database(std::move(db_name), std::move(rels));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, "catalog.json: " + std::string(e.what()));
    }
}

std::vector<Database> load_all(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) return {};
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "catalog.json")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<Database> out;
    for (const auto& d : dirs) out.push_back(load_dataset(d));
    return out;
}

RelationStats relation_stats(const Database& db, std::string_view relation) { return db.stats(relation); }

std::string serialize(const Database& db) {
    json out;
    out["name"] = db.name();
    out["relations"] = json::array();
    for (const auto& r : db.relations()) {
        json jr;
        jr["name"] = r.name();
        for (const auto& a : r.attributes()) {
            jr["attributes"].push_back({{"name", a.name}, {"kind", kind_name(a.kind)}, {"indexed", a.indexed}});
        }
        jr["tuples"] = json::array();
        for (const auto& t : r.tuples()) {
            json row = json::array();
            for (const auto& v : t) row.push_back(format_value(v));
            jr["tuples"].push_back(std::move(row));
        }
        for (const auto& [attr, idx] : r.indexes()) jr["indexes"][attr] = idx.structural_hash();
        const RelationStats& s = db.stats(r.name());
        jr["stats"]["tuple_count"] = s.tuple_count;
        for (const auto& e : s.extents) {
            json je{{"attribute", e.attribute}};
            if (e.rect) je["rect"] = rect_json(*e.rect);
            if (e.period) je["period"] = json::array({e.period->start().ms, e.period->end().ms});
            jr["stats"]["extents"].push_back(std::move(je));
        }
        out["relations"].push_back(std::move(jr));
    }
    for (const auto& [alias, target] : db.aliases()) out["aliases"][alias] = target;
    const KnowledgeBase& kb = db.kb();
    for (const auto& r : kb.relations()) out["kb"]["relations"].push_back({{"relation", r.relation}, {"aliases", r.aliases}});
    for (const auto& l : kb.locations()) {
        out["kb"]["locations"].push_back({{"id", l.id},
                                          {"name", l.name},
                                          {"kind", kind_name(l.kind)},
                                          {"relation", l.relation},
                                          {"tuple", l.tuple},
                                          {"bbox", rect_json(geo::bbox(l.geometry))}});
    }
    for (const auto& o : kb.objects()) {
        out["kb"]["objects"].push_back({{"id", o.id}, {"name", o.name}, {"relation", o.relation}, {"tuple", o.tuple}});
    }
    return out.dump();
}

}  // namespace nlstplan::catalog

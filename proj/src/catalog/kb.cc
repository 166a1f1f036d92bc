#include "nlstplan/catalog/kb.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nlstplan/catalog/database.h"

namespace nlstplan::catalog {

namespace {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double similarity_lower(std::string_view a, std::string_view b) {
    std::size_t m = std::max(a.size(), b.size());
    if (m == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

bool better(const KBMatch& x, const KBMatch& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.kind, x.index) < std::tie(y.kind, y.index);
}

}  // namespace

std::string_view match_kind_name(MatchKind k) {
    switch (k) {
        case MatchKind::Relation: return "relation";
        case MatchKind::Location: return "location";
        case MatchKind::Object: return "object";
    }
    return "";
}

double name_similarity(std::string_view a, std::string_view b) { return similarity_lower(to_lower(a), to_lower(b)); }

std::vector<std::string> relation_aliases(std::string_view relation) {
    std::vector<std::string> out{std::string(relation)};
    auto ends = [&](std::string_view suffix) {
        return relation.size() > suffix.size() && relation.substr(relation.size() - suffix.size()) == suffix;
    };
    std::string stem(relation);
    if (ends("ies")) {
        out.push_back(stem.substr(0, stem.size() - 3) + "y");
    } else if (ends("ses") || ends("xes") || ends("ches") || ends("shes")) {
        out.push_back(stem.substr(0, stem.size() - 2));
    }
    if (relation.size() > 1 && relation.back() == 's') {
        out.push_back(stem.substr(0, stem.size() - 1));
    } else {
        out.push_back(stem + "s");
    }
    return out;
}

KnowledgeBase::KnowledgeBase(std::vector<RelationKBEntry> relations, std::vector<LocationKBEntry> locations,
                             std::vector<ObjectKBEntry> objects)
    : relations_(std::move(relations)), locations_(std::move(locations)), objects_(std::move(objects)) {
    auto add = [this](std::string_view text, MatchKind kind, std::uint32_t index) {
        surfaces_.push_back({to_lower(text), kind, index});
        exact_.emplace(surfaces_.back().text, surfaces_.size() - 1);
    };
    for (std::uint32_t i = 0; i < relations_.size(); ++i) {
        for (const auto& a : relations_[i].aliases) add(a, MatchKind::Relation, i);
    }
    for (std::uint32_t i = 0; i < locations_.size(); ++i) add(locations_[i].name, MatchKind::Location, i);
    for (std::uint32_t i = 0; i < objects_.size(); ++i) add(objects_[i].name, MatchKind::Object, i);
}

std::vector<KBMatch> KnowledgeBase::lookup(std::string_view phrase) const {
    const std::string q = to_lower(phrase);
    std::vector<KBMatch> out;
    if (q.empty()) return out;

    auto [lo, hi] = exact_.equal_range(q);
    for (auto it = lo; it != hi; ++it) {
        const Surface& s = surfaces_[it->second];
        out.push_back({s.kind, s.index, 1.0, s.text});
    }
    if (out.empty()) {
        // A string of length L within similarity 0.8 of q has |L - |q|| <= 0.2 * max(L, |q|).
        for (const Surface& s : surfaces_) {
            double longer = static_cast<double>(std::max(s.text.size(), q.size()));
            double diff = std::abs(static_cast<double>(s.text.size()) - static_cast<double>(q.size()));
            if (diff > (1.0 - kFuzzyThreshold) * longer + 1e-9) continue;
            double score = similarity_lower(q, s.text);
            if (score >= kFuzzyThreshold) out.push_back({s.kind, s.index, score, s.text});
        }
    }
    std::sort(out.begin(), out.end(), better);
    // one match per entry: keep the best alias
    std::vector<KBMatch> unique;
    for (auto& m : out) {
        bool dup = std::any_of(unique.begin(), unique.end(),
                               [&](const KBMatch& u) { return u.kind == m.kind && u.index == m.index; });
        if (!dup) unique.push_back(std::move(m));
    }
    return unique;
}

std::vector<KBMatch> KnowledgeBase::lookup_exact(std::string_view phrase) const {
    std::vector<KBMatch> out;
    auto [lo, hi] = exact_.equal_range(to_lower(phrase));
    for (auto it = lo; it != hi; ++it) {
        const Surface& s = surfaces_[it->second];
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const KBMatch& u) { return u.kind == s.kind && u.index == s.index; });
        if (!dup) out.push_back({s.kind, s.index, 1.0, s.text});
    }
    std::sort(out.begin(), out.end(), better);
    return out;
}

std::vector<KBMatch> KnowledgeBase::suggest(std::string_view phrase, std::size_t n) const {
    const std::string q = to_lower(phrase);
    std::vector<KBMatch> all;
    all.reserve(surfaces_.size());
    for (const Surface& s : surfaces_) all.push_back({s.kind, s.index, similarity_lower(q, s.text), s.text});
    std::sort(all.begin(), all.end(), better);
    std::vector<KBMatch> out;
    for (auto& m : all) {
        if (out.size() == n) break;
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const KBMatch& u) { return u.kind == m.kind && u.index == m.index; });
        if (!dup) out.push_back(std::move(m));
    }
    return out;
}

const RelationKBEntry* KnowledgeBase::relation_entry(std::string_view relation) const {
    for (const auto& r : relations_) {
        if (r.relation == relation) return &r;
    }
    return nullptr;
}

KnowledgeBase build_kb(const Database& db) {
    std::vector<RelationKBEntry> rels;
    std::vector<LocationKBEntry> locs;
    std::vector<ObjectKBEntry> objs;
    for (std::size_t r = 0; r < db.declared_count(); ++r) {
        const Relation& rel = db.relations()[r];
        RelationKBEntry entry{rel.name(), relation_aliases(rel.name()), {}};
        for (const auto& a : rel.attributes()) {
            if (is_spatial(a.kind) || a.kind == AttrKind::MPoint || a.kind == AttrKind::Instant ||
                a.kind == AttrKind::Period) {
                entry.st_attributes.push_back(a);
            }
        }
        rels.push_back(std::move(entry));

        auto name_col = rel.name_attr();
        if (!name_col) continue;
        auto geo_col = rel.first_spatial();
        auto mp_col = rel.first_of(AttrKind::MPoint);
        for (std::size_t t = 0; t < rel.size(); ++t) {
            const Tuple& tup = rel.tuples()[t];
            const std::string& name = tup[*name_col].as_text();
            if (name.empty()) continue;
            if (geo_col) {
                locs.push_back({static_cast<std::uint32_t>(locs.size()), name, rel.attributes()[*geo_col].kind,
                                *tup[*geo_col].geometry(), rel.name(), static_cast<TupleId>(t)});
            }
            if (mp_col) {
                objs.push_back({static_cast<std::uint32_t>(objs.size()), name, rel.name(), static_cast<TupleId>(t),
                                rel.attributes()[*mp_col].name});
            }
        }
    }
    return KnowledgeBase(std::move(rels), std::move(locs), std::move(objs));
}

}  // namespace nlstplan::catalog

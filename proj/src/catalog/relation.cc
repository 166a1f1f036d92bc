#include "nlstplan/catalog/relation.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "nlstplan/error.h"

namespace nlstplan::catalog {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string index_id(std::string_view relation, std::string_view attribute) {
    return std::string(relation) + "_" + std::string(attribute) + "_rtree";
}

Relation::Relation(std::string name, std::vector<AttributeDef> attributes)
    : name_(std::move(name)), attrs_(std::move(attributes)) {
    std::set<std::string> seen;
    for (const auto& a : attrs_) {
        if (!seen.insert(a.name).second) {
            throw Error(ErrorCode::SchemaMismatch, name_ + ": duplicate attribute '" + a.name + "'");
        }
    }
}

void Relation::add(Tuple t) {
    if (t.size() != attrs_.size()) {
        throw Error(ErrorCode::SchemaMismatch, name_ + ": expected " + std::to_string(attrs_.size()) +
                                                   " values, got " + std::to_string(t.size()));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind() != attrs_[i].kind) {
            throw Error(ErrorCode::SchemaMismatch, name_ + "." + attrs_[i].name + ": expected " +
                                                       std::string(kind_name(attrs_[i].kind)) + ", got " +
                                                       std::string(kind_name(t[i].kind())));
        }
    }
    tuples_.push_back(std::move(t));
}

std::optional<std::size_t> Relation::find_attr(std::string_view name) const {
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (attrs_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Relation::attr(std::string_view name) const {
    if (auto i = find_attr(name)) return *i;
    throw Error(ErrorCode::InvalidArgument, name_ + " has no attribute '" + std::string(name) + "'");
}

std::optional<std::size_t> Relation::name_attr() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (attrs_[i].kind != AttrKind::Text) continue;
        if (!best || attrs_[i].name < attrs_[*best].name) best = i;
    }
    return best;
}

std::optional<std::size_t> Relation::first_of(AttrKind kind) const {
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (attrs_[i].kind == kind) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Relation::first_spatial() const {
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (is_spatial(attrs_[i].kind)) return i;
    }
    return std::nullopt;
}

std::optional<TupleId> Relation::find_by_name(std::string_view name) const {
    auto col = name_attr();
    if (!col) return std::nullopt;
    const std::string want = to_lower(name);
    for (std::size_t i = 0; i < tuples_.size(); ++i) {
        const std::string& have = tuples_[i][*col].as_text();
        if (have.size() == want.size() && to_lower(have) == want) return static_cast<TupleId>(i);
    }
    return std::nullopt;
}

void Relation::build_indexes(std::size_t fanout) {
    indexes_.clear();
    if (tuples_.empty()) return;
    for (std::size_t a = 0; a < attrs_.size(); ++a) {
        if (!attrs_[a].indexed || !is_spatial(attrs_[a].kind)) continue;
        std::vector<geo::RTreeEntry> entries;
        entries.reserve(tuples_.size());
        for (std::size_t i = 0; i < tuples_.size(); ++i) {
            entries.push_back({*tuples_[i][a].bbox(), static_cast<TupleId>(i)});
        }
        indexes_.emplace(attrs_[a].name, geo::RTree::bulk_load(std::move(entries), fanout));
    }
}

const geo::RTree* Relation::index(std::string_view attr) const {
    auto it = indexes_.find(std::string(attr));
    return it == indexes_.end() ? nullptr : &it->second;
}

}  // namespace nlstplan::catalog

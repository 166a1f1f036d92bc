#include "nlstplan/planner/map.h"

#include "nlstplan/error.h"

namespace nlstplan::planner {

using catalog::AttrKind;
using catalog::Database;
using catalog::LocationKBEntry;
using catalog::Relation;

namespace {

[[noreturn]] void unsupported(QueryType t, const std::string& why) {
    throw Error(ErrorCode::UnsupportedType, std::string(type_name(t)) + ": " + why);
}

/// Attribute carrying the relation's geometry: the first point, line or region.
std::size_t spatial_attr(QueryType t, const Relation& r) {
    if (auto i = r.first_spatial()) return *i;
    unsupported(t, "relation " + r.name() + " has no spatial attribute");
}

std::size_t moving_attr(QueryType t, const Relation& r) {
    if (auto i = r.first_of(AttrKind::MPoint)) return *i;
    unsupported(t, "relation " + r.name() + " has no moving-point attribute");
}

const Relation& relation_at(QueryType t, const nlu::ExtractionResult& ex, const Database& db, std::size_t i) {
    if (ex.relations.size() <= i) throw MissingSlotError("relation");
    const Relation* r = db.find(ex.relations[i]);
    if (!r) unsupported(t, "unknown relation " + ex.relations[i]);
    return *r;
}

const LocationKBEntry& location_of(const nlu::ExtractionResult& ex, const Database& db) {
    if (ex.locations.empty()) throw MissingSlotError("location");
    return db.kb().locations().at(ex.locations.front());
}

const catalog::ObjectKBEntry& object_of(const nlu::ExtractionResult& ex, const Database& db) {
    if (ex.objects.empty()) throw MissingSlotError("object");
    return db.kb().objects().at(ex.objects.front());
}

Expr geometry_literal(const LocationKBEntry& loc) { return Expr::literal(loc.geometry); }

Expr range_predicate(QueryType t, const Relation& r, const LocationKBEntry& loc, double d) {
    const auto& a = r.attributes()[spatial_attr(t, r)];
    Expr dist;
    if (a.kind == AttrKind::Point) {
        dist = Expr::call("distance", {Expr::attr(a.name), geometry_literal(loc)});
    } else if (loc.kind == AttrKind::Point) {
        dist = Expr::call("distance", {geometry_literal(loc), Expr::attr(a.name)});
    } else {
        unsupported(t, "distance needs a point operand");
    }
    return Expr::binary("<=", std::move(dist), Expr::literal(d));
}

Expr period_predicate(const std::string& attr, const geo::Period& p) {
    return Expr::binary("intersects", Expr::call("deftime", {Expr::attr(attr)}), Expr::literal(p));
}

int k_or_default(const nlu::ExtractionResult& ex, std::vector<std::string>* warnings) {
    if (ex.k) return *ex.k;
    if (warnings) warnings->push_back("no k given; using k = 1");
    return 1;
}

/// Source for a moving-object kNN: the unit-ordered companion, under its short alias when the
/// database has exactly one moving relation.
std::string utordered_source(QueryType t, const Database& db, const std::string& relation) {
    auto companion = db.companion_of(relation);
    if (!companion) unsupported(t, "relation " + relation + " has no unit-ordered companion");
    auto al = db.aliases().find(std::string(catalog::kUTOrderedAlias));
    if (al != db.aliases().end() && al->second == *companion) return std::string(catalog::kUTOrderedAlias);
    return *companion;
}

PhysicalPlan basic_spatial(const nlu::ExtractionResult& ex, const Database& db) {
    const Relation& r = relation_at(QueryType::BasicSpatial, ex, db, 0);
    spatial_attr(QueryType::BasicSpatial, r);
    return {PhysicalOp::consume(PhysicalOp::filter(PhysicalOp::feed(r.name()), location_predicate(r, location_of(ex, db))))};
}

PhysicalPlan time_interval(const nlu::ExtractionResult& ex, const Database& db) {
    const Relation& r = relation_at(QueryType::TimeInterval, ex, db, 0);
    const auto& attr = r.attributes()[moving_attr(QueryType::TimeInterval, r)].name;
    if (!ex.period) throw MissingSlotError("period");
    return {PhysicalOp::consume(PhysicalOp::filter(PhysicalOp::feed(r.name()), period_predicate(attr, *ex.period)))};
}

PhysicalPlan range(const nlu::ExtractionResult& ex, const Database& db) {
    const Relation& r = relation_at(QueryType::Range, ex, db, 0);
    const auto& loc = location_of(ex, db);
    if (!ex.distance) throw MissingSlotError("distance");
    return {PhysicalOp::consume(
        PhysicalOp::filter(PhysicalOp::feed(r.name()), range_predicate(QueryType::Range, r, loc, ex.distance->meters())))};
}

PhysicalPlan nearest(const nlu::ExtractionResult& ex, const Database& db, std::vector<std::string>* warnings) {
    constexpr QueryType t = QueryType::NearestNeighbor;
    if (!ex.objects.empty()) {
        const auto& obj = object_of(ex, db);
        const std::string rel = ex.relations.empty() ? obj.relation : ex.relations.front();
        const Relation& base = db.relation(rel);
        moving_attr(t, base);
        const std::string source = utordered_source(t, db, base.name());
        const Relation& comp = db.relation(source);
        const auto& attr = comp.attributes()[moving_attr(t, comp)].name;
        PhysicalOp op = PhysicalOp::feed(source);
        if (ex.period) op = PhysicalOp::filter(std::move(op), period_predicate(attr, *ex.period));
        return {PhysicalOp::consume(PhysicalOp::knearest(std::move(op), attr, ObjRef{obj.name, std::nullopt}, k_or_default(ex, warnings)))};
    }
    if (ex.locations.empty()) throw MissingSlotError("object");
    const Relation& r = relation_at(t, ex, db, 0);
    const auto& a = r.attributes()[spatial_attr(t, r)];
    if (a.kind != AttrKind::Point) unsupported(t, "static nearest neighbors need a point relation");
    const auto& loc = location_of(ex, db);
    return {PhysicalOp::consume(
        PhysicalOp::knearest(PhysicalOp::feed(r.name()), a.name, ObjRef{loc.name, std::nullopt}, k_or_default(ex, warnings)))};
}

PhysicalPlan join(const nlu::ExtractionResult& ex, const Database& db) {
    constexpr QueryType t = QueryType::Join;
    const Relation* left = &relation_at(t, ex, db, 0);
    const Relation* right = &relation_at(t, ex, db, 1);
    std::string fn = ex.distance ? "dist" : ex.predicate.value_or("intersects");
    auto kind = [&](const Relation* r) { return r->attributes()[spatial_attr(t, *r)].kind; };
    if (fn == "contains") {
        if (kind(left) == AttrKind::Point && kind(right) == AttrKind::Region) std::swap(left, right);
        if (kind(left) != AttrKind::Region || kind(right) != AttrKind::Point) {
            unsupported(t, "contains joins a region relation with a point relation");
        }
    } else if (fn == "dist" && kind(left) != AttrKind::Point && kind(right) != AttrKind::Point) {
        unsupported(t, "distance joins need a point relation");
    }
    PhysicalOp rhs = PhysicalOp::feed(right->name());
    if (!ex.locations.empty()) rhs = PhysicalOp::filter(std::move(rhs), location_predicate(*right, location_of(ex, db)));
    return {PhysicalOp::consume(PhysicalOp::spatialjoin(PhysicalOp::feed(left->name()), std::move(rhs),
                                                        left->attributes()[spatial_attr(t, *left)].name,
                                                        right->attributes()[spatial_attr(t, *right)].name, fn,
                                                        ex.distance ? ex.distance->meters() : 0))};
}

PhysicalPlan similarity(const nlu::ExtractionResult& ex, const Database& db, std::vector<std::string>* warnings) {
    constexpr QueryType t = QueryType::Similarity;
    const auto& obj = object_of(ex, db);
    const Relation& r = db.relation(ex.relations.empty() ? obj.relation : ex.relations.front());
    const auto& attr = r.attributes()[moving_attr(t, r)].name;
    return {PhysicalOp::consume(
        PhysicalOp::similarity(PhysicalOp::feed(r.name()), attr, ObjRef{obj.name, std::nullopt}, k_or_default(ex, warnings)))};
}

PhysicalPlan aggregation(const nlu::ExtractionResult& ex, const Database& db) {
    constexpr QueryType t = QueryType::Aggregation;
    if (!ex.agg) unsupported(t, "no aggregate function named");
    const Relation& r = relation_at(t, ex, db, 0);
    PhysicalOp op = PhysicalOp::feed(r.name());
    if (!ex.locations.empty()) {
        const auto& loc = location_of(ex, db);
        op = PhysicalOp::filter(std::move(op), ex.distance ? range_predicate(t, r, loc, ex.distance->meters())
                                                           : location_predicate(r, loc));
    } else if (ex.distance) {
        throw MissingSlotError("location");
    }
    if (ex.period) {
        op = PhysicalOp::filter(std::move(op), period_predicate(r.attributes()[moving_attr(t, r)].name, *ex.period));
    }
    if (*ex.agg == "count") return {PhysicalOp::count(std::move(op))};
    const auto& a = r.attributes()[spatial_attr(t, r)];
    if (a.kind == AttrKind::Point) unsupported(t, *ex.agg + " needs a line or region relation");
    return {PhysicalOp::aggregate(std::move(op), *ex.agg, a.name)};
}

}  // namespace

Expr location_predicate(const Relation& relation, const LocationKBEntry& loc) {
    auto i = relation.first_spatial();
    if (!i) throw Error(ErrorCode::UnsupportedType, "relation " + relation.name() + " has no spatial attribute");
    const auto& a = relation.attributes()[*i];
    if (a.kind == AttrKind::Point && loc.kind == AttrKind::Region) {
        return Expr::call("contains", {geometry_literal(loc), Expr::attr(a.name)});
    }
    if (a.kind == AttrKind::Region && loc.kind == AttrKind::Point) {
        return Expr::call("contains", {Expr::attr(a.name), geometry_literal(loc)});
    }
    return Expr::call("intersects", {Expr::attr(a.name), geometry_literal(loc)});
}

PhysicalPlan map_query(QueryType type, const nlu::ExtractionResult& ex, const Database& db,
                       std::vector<std::string>* warnings) {
    switch (type) {
        case QueryType::BasicSpatial: return basic_spatial(ex, db);
        case QueryType::TimeInterval: return time_interval(ex, db);
        case QueryType::Range: return range(ex, db);
        case QueryType::NearestNeighbor: return nearest(ex, db, warnings);
        case QueryType::Join: return join(ex, db);
        case QueryType::Similarity: return similarity(ex, db, warnings);
        case QueryType::Aggregation: return aggregation(ex, db);
    }
    unsupported(type, "unknown query type");
}

}  // namespace nlstplan::planner

#pragma once

#include <string>
#include <vector>

#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/query_type.h"
#include "nlstplan/nlu/extract.h"
#include "nlstplan/planner/plan.h"

namespace nlstplan::planner {

/// Baseline (unindexed) plan for a classified, extracted query.
///
/// Location geometries are embedded as WKT literals. A nearest-neighbor or similarity query
/// without k uses k = 1 and appends a warning to `warnings` when given.
/// Throws MissingSlotError naming the absent slot, and UnsupportedType when the extracted
/// entities cannot form a query of `type` (e.g. a time filter over a relation with no mpoint).
PhysicalPlan map_query(QueryType type, const nlu::ExtractionResult& ex, const catalog::Database& db,
                       std::vector<std::string>* warnings = nullptr);

/// Filter predicate selecting tuples of `relation` related to a KB location: containment for
/// point tuples in a region, containment of a point location for region tuples, intersection
/// otherwise.
Expr location_predicate(const catalog::Relation& relation, const catalog::LocationKBEntry& loc);

}  // namespace nlstplan::planner

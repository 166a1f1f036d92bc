#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlstplan/catalog/database.h"
#include "nlstplan/planner/plan.h"

namespace nlstplan::planner {

/// Connecting line between the query object and one neighbor over one result interval.
struct KnnLink {
    geo::Point query;
    geo::Point neighbor;
    int rank = 1;
    double distance = 0;
    /// Absent for static (point) nearest-neighbor results.
    std::optional<geo::Period> interval;
    std::string neighbor_name;

    friend bool operator==(const KnnLink&, const KnnLink&) = default;
};

struct ResultSet {
    std::vector<catalog::AttributeDef> schema;
    std::vector<catalog::Tuple> rows;
    std::vector<KnnLink> knn_links;

    friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

/// A filter predicate bound to a schema; attribute references are resolved once.
/// Throws ExecError for unknown attributes or functions and for unsupported operand types.
class BoundPredicate {
public:
    BoundPredicate(const Expr& e, const std::vector<catalog::AttributeDef>& schema);
    ~BoundPredicate();
    BoundPredicate(BoundPredicate&&) noexcept;
    BoundPredicate& operator=(BoundPredicate&&) noexcept;

    bool test(const catalog::Tuple& t) const;

    struct Node;

private:
    std::unique_ptr<Node> root_;
};

struct Execution {
    ResultSet result;
    double elapsed_ms = 0;
};

/// Evaluates the operator tree bottom-up. knearest delegates to knearest_sweep: its period is
/// the one named by a `deftime(..) intersects [..)` filter directly below it, otherwise the
/// query object's lifetime. Throws ExecError naming the failing operator.
Execution execute(const PhysicalPlan& p, const catalog::Database& db);

/// Tabular JSON: {"schema": [{name, kind}], "rows": [[cell text...]]}.
nlohmann::json rows_json(const ResultSet& rs);

}  // namespace nlstplan::planner

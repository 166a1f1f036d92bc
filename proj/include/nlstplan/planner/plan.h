#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::planner {

/// Predicate expression tree.
///
/// Attr      `.name`
/// Literal   number, "string", TRUE/FALSE, WKT geometry, `[start, end)` period
/// Call      contains | intersects | distance | deftime | length | area
/// Binary    = # < <= > >= and or intersects (infix)
/// Not       not(expr)
struct Expr {
    enum class Kind { Attr, Literal, Call, Binary, Not };
    using Literal = std::variant<double, std::string, bool, geo::Geometry, geo::Period>;

    Kind kind = Kind::Literal;
    std::string name;  // attribute, function or operator
    Literal value = 0.0;
    std::vector<Expr> args;

    static Expr attr(std::string name);
    static Expr literal(Literal v);
    static Expr call(std::string fn, std::vector<Expr> args);
    static Expr binary(std::string op, Expr lhs, Expr rhs);
    static Expr negate(Expr e);

    friend bool operator==(const Expr& a, const Expr& b);
};

std::string render_expr(const Expr& e);

/// Object argument of knearest/similarity: a tuple or location name, or a literal point.
struct ObjRef {
    std::string name;
    std::optional<geo::Point> point;
    friend bool operator==(const ObjRef&, const ObjRef&) = default;
};

enum class OpKind {
    Feed,
    WindowIntersects,
    Filter,
    KNearest,
    SpatialJoin,
    Similarity,
    Project,
    Consume,
    Count,
    Aggregate,
};

std::string_view op_name(OpKind k);

struct PhysicalOp {
    OpKind kind = OpKind::Consume;
    std::string relation;                 // Feed, WindowIntersects
    std::string index;                    // WindowIntersects: <relation>_<attr>_rtree
    geo::Rect rect;                       // WindowIntersects
    std::optional<Expr> predicate;        // Filter
    std::string attr;                     // KNearest, Similarity, Aggregate; SpatialJoin left
    std::string attr2;                    // SpatialJoin right
    std::string fn;                       // SpatialJoin: intersects | contains | dist; Aggregate: avg | max | min | sum | count
    double dist = 0;                      // SpatialJoin dist threshold
    ObjRef object;                        // KNearest, Similarity
    int k = 0;                            // KNearest, Similarity
    std::vector<std::string> attrs;       // Project
    std::vector<PhysicalOp> children;

    static PhysicalOp feed(std::string relation);
    static PhysicalOp window(std::string index, std::string relation, geo::Rect rect);
    static PhysicalOp filter(PhysicalOp child, Expr predicate);
    static PhysicalOp knearest(PhysicalOp child, std::string attr, ObjRef object, int k);
    static PhysicalOp spatialjoin(PhysicalOp left, PhysicalOp right, std::string left_attr, std::string right_attr,
                                  std::string fn, double dist = 0);
    static PhysicalOp similarity(PhysicalOp child, std::string attr, ObjRef object, int k);
    static PhysicalOp project(PhysicalOp child, std::vector<std::string> attrs);
    static PhysicalOp consume(PhysicalOp child);
    static PhysicalOp count(PhysicalOp child);
    static PhysicalOp aggregate(PhysicalOp child, std::string fn, std::string attr);

    /// Attribute indexed by a WindowIntersects leaf (index id minus the relation prefix).
    std::string index_attr() const;

    friend bool operator==(const PhysicalOp& a, const PhysicalOp& b);
};

struct PhysicalPlan {
    PhysicalOp root;

    /// Relations read by feed/windowintersects leaves, in plan order.
    std::vector<std::string> sources() const;
    bool uses_index() const;

    friend bool operator==(const PhysicalPlan&, const PhysicalPlan&) = default;
};

/// Throws InvalidArgument when terminals, leaves or arities are misplaced.
void validate(const PhysicalPlan& p);

/// Single-line canonical text:
///   plan     := "query" stream terminal ";"
///   stream   := source op* | stream stream "spatialjoin[" ATTR "," ATTR "," PREDNAME "]" op*
///   source   := REL "feed" | REL_ATTR_rtree REL "windowintersects[" xmin ymin xmax ymax "]"
///   op       := "filter [(" pred ")]" | "knearest[" ATTR "," OBJ "," INT "]"
///             | "similarity[" ATTR "," OBJ "," INT "]" | "project[" ATTR ("," ATTR)* "]"
///   terminal := "consume" | "count" | "aggregate[" FN "," ATTR "]"
/// PREDNAME is intersects, contains or dist<=D. OBJ is an identifier, a quoted name or a
/// POINT literal.
std::string render_plan(const PhysicalPlan& p);

/// Throws PlanSyntaxError carrying the byte offset and text of the offending token.
PhysicalPlan parse_plan(std::string_view text);

/// Nested operator tree: {"op", "params", "children"}.
nlohmann::json plan_tree(const PhysicalPlan& p);

}  // namespace nlstplan::planner

#include "nlstplan/planner/exec.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "nlstplan/error.h"
#include "nlstplan/geo/knearest.h"
#include "nlstplan/geo/predicates.h"

namespace nlstplan::planner {

using catalog::AttrKind;
using catalog::AttributeDef;
using catalog::Tuple;
using catalog::Value;

namespace {

[[noreturn]] void exec_fail(const std::string& msg) { throw Error(ErrorCode::ExecError, msg); }

/// Runtime value of a predicate sub-expression. Geometries are borrowed from tuples or literals.
using Val = std::variant<std::monostate, double, std::string, bool, geo::Point, const geo::Line*, const geo::Region*,
                         const geo::MovingPoint*, geo::Period, std::vector<geo::Period>>;

Val from_value(const Value& v) {
    switch (v.kind()) {
        case AttrKind::Int: return static_cast<double>(v.as_int());
        case AttrKind::Real: return v.as_real();
        case AttrKind::Text: return v.as_text();
        case AttrKind::Point: return v.as_point();
        case AttrKind::Line: return &v.as_line();
        case AttrKind::Region: return &v.as_region();
        case AttrKind::MPoint: return &v.as_mpoint();
        case AttrKind::Instant: return static_cast<double>(v.as_instant().ms);
        case AttrKind::Period: return v.as_period();
    }
    return std::monostate{};
}

Val from_literal(const Expr::Literal& lit) {
    struct V {
        Val operator()(double d) const { return d; }
        Val operator()(const std::string& s) const { return s; }
        Val operator()(bool b) const { return b; }
        Val operator()(const geo::Geometry& g) const {
            if (const auto* p = std::get_if<geo::Point>(&g)) return *p;
            if (const auto* l = std::get_if<geo::Line>(&g)) return l;
            return &std::get<geo::Region>(g);
        }
        Val operator()(const geo::Period& p) const { return p; }
    };
    return std::visit(V{}, lit);
}

const char* val_kind(const Val& v) {
    static constexpr const char* names[] = {"null", "number", "text", "bool", "point", "line", "region", "mpoint", "period", "periods"};
    return names[v.index()];
}

[[noreturn]] void unsupported(const std::string& fn, const Val& a, const Val& b) {
    exec_fail(fn + "(" + val_kind(a) + ", " + val_kind(b) + ") is not supported");
}

double point_line_distance(geo::Point p, const geo::Line& l) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : l.segments()) best = std::min(best, geo::distance(p, s));
    return best;
}

std::optional<double> point_distance(geo::Point p, const Val& other) {
    if (const auto* q = std::get_if<geo::Point>(&other)) return geo::distance(p, *q);
    if (const auto* l = std::get_if<const geo::Line*>(&other)) return point_line_distance(p, **l);
    if (const auto* r = std::get_if<const geo::Region*>(&other)) return geo::distance(p, geo::Geometry(**r));
    return std::nullopt;
}

double fn_distance(const Val& a, const Val& b) {
    if (const auto* p = std::get_if<geo::Point>(&a)) {
        if (auto d = point_distance(*p, b)) return *d;
    }
    if (const auto* p = std::get_if<geo::Point>(&b)) {
        if (auto d = point_distance(*p, a)) return *d;
    }
    unsupported("distance", a, b);
}

bool fn_contains(const Val& a, const Val& b) {
    if (const auto* r = std::get_if<const geo::Region*>(&a)) {
        if (const auto* p = std::get_if<geo::Point>(&b)) return geo::contains(**r, *p);
    }
    if (const auto* p = std::get_if<geo::Period>(&a)) {
        if (const auto* q = std::get_if<geo::Period>(&b)) return p->start() <= q->start() && q->end() <= p->end();
    }
    unsupported("contains", a, b);
}

std::optional<std::vector<geo::Period>> as_periods(const Val& v) {
    if (const auto* p = std::get_if<geo::Period>(&v)) return std::vector<geo::Period>{*p};
    if (const auto* ps = std::get_if<std::vector<geo::Period>>(&v)) return *ps;
    return std::nullopt;
}

bool line_touches(const geo::Line& a, const geo::Line& b) {
    if (!a.bbox().intersects(b.bbox())) return false;
    for (const auto& s : a.segments()) {
        for (const auto& t : b.segments()) {
            if (geo::segments_intersect(s, t)) return true;
        }
    }
    return false;
}

bool fn_intersects(const Val& a, const Val& b) {
    auto pa = as_periods(a);
    auto pb = as_periods(b);
    if (pa && pb) {
        for (const auto& x : *pa) {
            for (const auto& y : *pb) {
                if (x.intersects(y)) return true;
            }
        }
        return false;
    }
    const auto* ra = std::get_if<const geo::Region*>(&a);
    const auto* rb = std::get_if<const geo::Region*>(&b);
    const auto* la = std::get_if<const geo::Line*>(&a);
    const auto* lb = std::get_if<const geo::Line*>(&b);
    const auto* xa = std::get_if<geo::Point>(&a);
    const auto* xb = std::get_if<geo::Point>(&b);
    if (ra && rb) return geo::intersects(**ra, **rb);
    if (la && rb) return geo::intersects(**la, **rb);
    if (ra && lb) return geo::intersects(**lb, **ra);
    if (xa && rb) return geo::contains(**rb, *xa);
    if (ra && xb) return geo::contains(**ra, *xb);
    if (la && lb) return line_touches(**la, **lb);
    if (xa && lb) return point_line_distance(*xa, **lb) == 0;
    if (la && xb) return point_line_distance(*xb, **la) == 0;
    if (xa && xb) return *xa == *xb;
    unsupported("intersects", a, b);
}

double as_number(const Val& v, const char* what) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    exec_fail(std::string(what) + " expects a number, got " + val_kind(v));
}

bool as_bool(const Val& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    exec_fail(std::string("predicate must be boolean, got ") + val_kind(v));
}

bool compare(const std::string& op, const Val& a, const Val& b) {
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
        const auto& x = std::get<std::string>(a);
        const auto& y = std::get<std::string>(b);
        if (op == "=") return x == y;
        if (op == "#") return x != y;
        if (op == "<") return x < y;
        if (op == "<=") return x <= y;
        if (op == ">") return x > y;
        if (op == ">=") return x >= y;
    }
    if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
        if (op == "=") return std::get<bool>(a) == std::get<bool>(b);
        if (op == "#") return std::get<bool>(a) != std::get<bool>(b);
    }
    double x = as_number(a, op.c_str());
    double y = as_number(b, op.c_str());
    if (op == "=") return x == y;
    if (op == "#") return x != y;
    if (op == "<") return x < y;
    if (op == "<=") return x <= y;
    if (op == ">") return x > y;
    if (op == ">=") return x >= y;
    exec_fail("unknown operator " + op);
}

double measure(const Value& v, const std::string& attr) {
    switch (v.kind()) {
        case AttrKind::Int: return static_cast<double>(v.as_int());
        case AttrKind::Real: return v.as_real();
        case AttrKind::Line: return geo::length(v.as_line());
        case AttrKind::Region: return geo::area(v.as_region());
        default: exec_fail("cannot aggregate attribute " + attr + " of kind " + std::string(catalog::kind_name(v.kind())));
    }
}

std::optional<std::size_t> find_attr(const std::vector<AttributeDef>& schema, std::string_view name) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t need_attr(const std::vector<AttributeDef>& schema, std::string_view name) {
    if (auto i = find_attr(schema, name)) return *i;
    exec_fail("unknown attribute " + std::string(name));
}

}  // namespace

struct BoundPredicate::Node {
    Expr::Kind kind = Expr::Kind::Literal;
    std::string name;
    std::size_t attr = 0;
    Val literal;
    std::vector<Node> args;

    Val eval(const Tuple& t) const {
        switch (kind) {
            case Expr::Kind::Attr: return from_value(t[attr]);
            case Expr::Kind::Literal: return literal;
            case Expr::Kind::Not: return !as_bool(args[0].eval(t));
            case Expr::Kind::Binary: {
                if (name == "and") return as_bool(args[0].eval(t)) && as_bool(args[1].eval(t));
                if (name == "or") return as_bool(args[0].eval(t)) || as_bool(args[1].eval(t));
                Val a = args[0].eval(t);
                Val b = args[1].eval(t);
                if (name == "intersects") return fn_intersects(a, b);
                return compare(name, a, b);
            }
            case Expr::Kind::Call: {
                if (name == "deftime") {
                    Val a = args[0].eval(t);
                    const auto* m = std::get_if<const geo::MovingPoint*>(&a);
                    if (!m) exec_fail(std::string("deftime expects an mpoint, got ") + val_kind(a));
                    return geo::deftime(**m);
                }
                if (name == "length" || name == "area") {
                    Val a = args[0].eval(t);
                    if (const auto* l = std::get_if<const geo::Line*>(&a); l && name == "length") return geo::length(**l);
                    if (const auto* r = std::get_if<const geo::Region*>(&a); r && name == "area") return geo::area(**r);
                    exec_fail(name + " does not apply to " + val_kind(a));
                }
                Val a = args[0].eval(t);
                Val b = args[1].eval(t);
                if (name == "contains") return fn_contains(a, b);
                if (name == "intersects") return fn_intersects(a, b);
                return fn_distance(a, b);
            }
        }
        return std::monostate{};
    }
};

namespace {

BoundPredicate::Node bind(const Expr& e, const std::vector<AttributeDef>& schema) {
    BoundPredicate::Node n;
    n.kind = e.kind;
    n.name = e.name;
    switch (e.kind) {
        case Expr::Kind::Attr: n.attr = need_attr(schema, e.name); break;
        case Expr::Kind::Literal: n.literal = from_literal(e.value); break;
        case Expr::Kind::Call: {
            static const std::map<std::string, std::size_t, std::less<>> arity{
                {"contains", 2}, {"intersects", 2}, {"distance", 2}, {"deftime", 1}, {"length", 1}, {"area", 1}};
            auto it = arity.find(e.name);
            if (it == arity.end()) exec_fail("unknown function " + e.name);
            if (e.args.size() != it->second) exec_fail(e.name + " takes " + std::to_string(it->second) + " arguments");
            break;
        }
        case Expr::Kind::Binary: {
            static const std::set<std::string, std::less<>> ops{"=", "#", "<", "<=", ">", ">=", "and", "or", "intersects"};
            if (!ops.count(e.name)) exec_fail("unknown operator " + e.name);
            break;
        }
        case Expr::Kind::Not: break;
    }
    for (const auto& a : e.args) n.args.push_back(bind(a, schema));
    return n;
}

}  // namespace

BoundPredicate::BoundPredicate(const Expr& e, const std::vector<AttributeDef>& schema)
    : root_(std::make_unique<Node>(bind(e, schema))) {}
BoundPredicate::~BoundPredicate() = default;
BoundPredicate::BoundPredicate(BoundPredicate&&) noexcept = default;
BoundPredicate& BoundPredicate::operator=(BoundPredicate&&) noexcept = default;

bool BoundPredicate::test(const Tuple& t) const { return as_bool(root_->eval(t)); }

namespace {

/// Intermediate result. Rows point into the database or into the executor's arena.
struct Stream {
    std::vector<AttributeDef> schema;
    std::vector<const Tuple*> rows;
    /// Relation the stream was read from; empty after a join.
    std::string origin;
    std::vector<KnnLink> links;
};

std::optional<geo::Period> filter_period(const PhysicalOp& op) {
    if (op.kind != OpKind::Filter || !op.predicate) return std::nullopt;
    const Expr& e = *op.predicate;
    if (e.kind != Expr::Kind::Binary || e.name != "intersects") return std::nullopt;
    for (int side = 0; side < 2; ++side) {
        const Expr& call = e.args[side];
        const Expr& lit = e.args[1 - side];
        if (call.kind == Expr::Kind::Call && call.name == "deftime" && lit.kind == Expr::Kind::Literal) {
            if (const auto* p = std::get_if<geo::Period>(&lit.value)) return *p;
        }
    }
    return std::nullopt;
}

std::optional<geo::Period> hull(const std::vector<geo::Period>& ps) {
    if (ps.empty()) return std::nullopt;
    return geo::Period(ps.front().start(), ps.back().end());
}

std::string lower(std::string_view s) { return catalog::to_lower(s); }

class Executor {
public:
    explicit Executor(const catalog::Database& db) : db_(db) {}

    ResultSet run(const PhysicalOp& root) {
        ResultSet rs;
        switch (root.kind) {
            case OpKind::Consume: {
                Stream s = eval(root.children.at(0));
                rs.schema = std::move(s.schema);
                rs.rows.reserve(s.rows.size());
                for (const Tuple* t : s.rows) rs.rows.push_back(*t);
                rs.knn_links = std::move(s.links);
                break;
            }
            case OpKind::Count: {
                Stream s = eval(root.children.at(0));
                rs.schema = {{"count", AttrKind::Int, false}};
                rs.rows.push_back({Value(static_cast<std::int64_t>(s.rows.size()))});
                break;
            }
            case OpKind::Aggregate: rs = aggregate(root); break;
            default: exec_fail("plan root must be consume, count or aggregate");
        }
        return rs;
    }

private:
    const Tuple* own(Tuple t) {
        arena_.push_back(std::move(t));
        return &arena_.back();
    }

    Stream eval(const PhysicalOp& op) {
        try {
            return eval_op(op);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ExecError) throw;
            exec_fail(std::string(op_name(op.kind)) + ": " + e.what());
        }
    }

    Stream eval_op(const PhysicalOp& op) {
        switch (op.kind) {
            case OpKind::Feed: {
                const catalog::Relation& r = db_.relation(op.relation);
                Stream s{r.attributes(), {}, r.name(), {}};
                s.rows.reserve(r.size());
                for (const auto& t : r.tuples()) s.rows.push_back(&t);
                return s;
            }
            case OpKind::WindowIntersects: {
                const catalog::Relation& r = db_.relation(op.relation);
                const geo::RTree* idx = r.index(op.index_attr());
                if (!idx) exec_fail("no index " + op.index);
                auto ids = idx->window(op.rect);
                std::sort(ids.begin(), ids.end());
                Stream s{r.attributes(), {}, r.name(), {}};
                s.rows.reserve(ids.size());
                for (auto id : ids) s.rows.push_back(&r.tuple(id));
                return s;
            }
            case OpKind::Filter: {
                Stream s = eval(op.children.at(0));
                BoundPredicate pred(*op.predicate, s.schema);
                std::vector<const Tuple*> kept;
                for (const Tuple* t : s.rows) {
                    if (pred.test(*t)) kept.push_back(t);
                }
                s.rows = std::move(kept);
                return s;
            }
            case OpKind::Project: {
                Stream s = eval(op.children.at(0));
                std::vector<std::size_t> cols;
                std::vector<AttributeDef> schema;
                for (const auto& a : op.attrs) {
                    cols.push_back(need_attr(s.schema, a));
                    schema.push_back(s.schema[cols.back()]);
                }
                std::vector<const Tuple*> rows;
                rows.reserve(s.rows.size());
                for (const Tuple* t : s.rows) {
                    Tuple out;
                    for (auto c : cols) out.push_back((*t)[c]);
                    rows.push_back(own(std::move(out)));
                }
                s.schema = std::move(schema);
                s.rows = std::move(rows);
                return s;
            }
            case OpKind::KNearest: return knearest(op);
            case OpKind::Similarity: return similarity(op);
            case OpKind::SpatialJoin: return spatialjoin(op);
            default: exec_fail(std::string(op_name(op.kind)) + " must be the plan root");
        }
    }

    /// The query object: a point literal, a tuple of the stream's own relation, a KB object or
    /// a KB location. `self` is set when the object is a tuple of the origin relation.
    struct Query {
        std::optional<geo::MovingPoint> moving;
        std::optional<geo::Point> point;
        std::optional<std::string> self;
    };

    Query resolve(const ObjRef& obj, const Stream& s, const std::string& attr) {
        Query q;
        if (obj.point) {
            q.point = *obj.point;
            return q;
        }
        if (const catalog::Relation* r = db_.find(s.origin)) {
            if (auto id = r->find_by_name(obj.name)) {
                const Value& v = r->tuple(*id)[r->attr(attr)];
                if (v.kind() == AttrKind::MPoint) {
                    q.moving = v.as_mpoint();
                } else if (v.kind() == AttrKind::Point) {
                    q.point = v.as_point();
                } else {
                    q.point = geo::anchor(*v.geometry());
                }
                q.self = lower(obj.name);
                return q;
            }
        }
        for (const auto& m : db_.kb().lookup_exact(obj.name)) {
            if (m.kind == catalog::MatchKind::Object) {
                const auto& o = db_.kb().objects()[m.index];
                const catalog::Relation& r = db_.relation(o.relation);
                q.moving = r.tuple(o.tuple)[r.attr(o.attribute)].as_mpoint();
                return q;
            }
            if (m.kind == catalog::MatchKind::Location) {
                q.point = geo::anchor(db_.kb().locations()[m.index].geometry);
                return q;
            }
        }
        exec_fail("unknown object " + obj.name);
    }

    std::optional<std::size_t> name_column(const Stream& s) const {
        if (auto i = find_attr(s.schema, "name"); i && s.schema[*i].kind == AttrKind::Text) return i;
        for (std::size_t i = 0; i < s.schema.size(); ++i) {
            if (s.schema[i].kind == AttrKind::Text) return i;
        }
        return std::nullopt;
    }

    /// Rows of `s` minus the query object itself.
    std::vector<std::size_t> candidates_of(const Stream& s, const Query& q) const {
        auto name_col = name_column(s);
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < s.rows.size(); ++i) {
            if (q.self && name_col && lower((*s.rows[i])[*name_col].as_text()) == *q.self) continue;
            out.push_back(i);
        }
        return out;
    }

    std::string name_of(const Stream& s, std::size_t row) const {
        auto c = name_column(s);
        return c ? (*s.rows[row])[*c].as_text() : std::string();
    }

    Stream knearest(const PhysicalOp& op) {
        Stream s = eval(op.children.at(0));
        const std::size_t col = need_attr(s.schema, op.attr);
        const AttrKind kind = s.schema[col].kind;
        if (kind != AttrKind::MPoint && kind != AttrKind::Point) {
            exec_fail("knearest needs a point or mpoint attribute, " + op.attr + " is " + std::string(catalog::kind_name(kind)));
        }
        Query q = resolve(op.object, s, op.attr);
        auto ids = candidates_of(s, q);

        Stream out;
        out.schema = s.schema;
        out.origin = s.origin;
        out.schema.push_back({"rank", AttrKind::Int, false});

        if (kind == AttrKind::Point) {
            // static: every distance is constant, so only the k closest (with ties) can rank
            if (!q.point) exec_fail("static knearest needs a point query object");
            const geo::Period unit(0, 1);
            std::vector<std::pair<double, std::size_t>> by_dist;
            for (auto i : ids) by_dist.emplace_back(geo::distance(*q.point, (*s.rows[i])[col].as_point()), i);
            std::sort(by_dist.begin(), by_dist.end());
            std::vector<geo::Candidate> cands;
            for (std::size_t j = 0; j < by_dist.size(); ++j) {
                if (j >= static_cast<std::size_t>(op.k) && by_dist[j].first > by_dist[op.k - 1].first) break;
                auto i = by_dist[j].second;
                cands.push_back({static_cast<geo::TupleId>(i),
                                 geo::MovingPoint::stationary((*s.rows[i])[col].as_point(), unit)});
            }
            out.schema.push_back({"distance", AttrKind::Real, false});
            for (const auto& ni : geo::knearest_sweep(cands, geo::MovingPoint::stationary(*q.point, unit), unit, op.k)) {
                const Tuple& src = *s.rows[ni.object];
                geo::Point p = src[col].as_point();
                double d = geo::distance(*q.point, p);
                Tuple row = src;
                row.push_back(Value(static_cast<std::int64_t>(ni.rank)));
                row.push_back(Value(d));
                out.rows.push_back(own(std::move(row)));
                out.links.push_back({*q.point, p, ni.rank, d, std::nullopt, name_of(s, ni.object)});
            }
            return out;
        }

        std::optional<geo::Period> period = filter_period(op.children.at(0));
        if (!period && q.moving) period = hull(geo::deftime(*q.moving));
        if (!period) {
            std::vector<geo::Period> all;
            for (auto i : ids) {
                for (const auto& p : geo::deftime((*s.rows[i])[col].as_mpoint())) all.push_back(p);
            }
            std::sort(all.begin(), all.end());
            if (!all.empty()) {
                auto end = std::max_element(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.end() < b.end(); })->end();
                period = geo::Period(all.front().start(), end);
            }
        }
        out.schema.push_back({"interval", AttrKind::Period, false});
        if (!period) return out;
        const geo::MovingPoint query = q.moving ? *q.moving : geo::MovingPoint::stationary(*q.point, *period);

        std::vector<geo::Candidate> cands;
        cands.reserve(ids.size());
        for (auto i : ids) cands.push_back({static_cast<geo::TupleId>(i), (*s.rows[i])[col].as_mpoint()});
        for (const auto& ni : geo::knearest_sweep(cands, query, *period, op.k)) {
            const Tuple& src = *s.rows[ni.object];
            const auto& traj = src[col].as_mpoint();
            Tuple row = src;
            row[col] = Value(geo::atperiods(traj, ni.interval));
            row.push_back(Value(static_cast<std::int64_t>(ni.rank)));
            row.push_back(Value(ni.interval));
            out.rows.push_back(own(std::move(row)));
            const double mid = (static_cast<double>(ni.interval.start().ms) + static_cast<double>(ni.interval.end().ms)) / 2;
            auto qp = geo::mpoint_at(query, mid);
            auto np = geo::mpoint_at(traj, mid);
            if (qp && np) out.links.push_back({*qp, *np, ni.rank, geo::distance(*qp, *np), ni.interval, name_of(s, ni.object)});
        }
        return out;
    }

    /// Time-averaged Euclidean distance over the common lifetime; +inf when there is none.
    static double mean_distance(const geo::MovingPoint& a, const geo::MovingPoint& b) {
        double integral = 0;
        double total = 0;
        std::size_t i = 0;
        std::size_t j = 0;
        const auto& ua = a.units();
        const auto& ub = b.units();
        while (i < ua.size() && j < ub.size()) {
            auto common = ua[i].period.intersection(ub[j].period);
            if (common) {
                const double t0 = static_cast<double>(common->start().ms);
                const double t1 = static_cast<double>(common->end().ms);
                // composite Simpson; the distance is the square root of a quadratic in t
                constexpr int panels = 16;
                const double h = (t1 - t0) / panels;
                double acc = 0;
                for (int p = 0; p <= panels; ++p) {
                    const double t = t0 + h * p;
                    const double w = (p == 0 || p == panels) ? 1 : (p % 2 ? 4 : 2);
                    acc += w * geo::distance(ua[i].at(t), ub[j].at(t));
                }
                integral += acc * h / 3;
                total += t1 - t0;
            }
            if (ua[i].period.end() < ub[j].period.end()) {
                ++i;
            } else {
                ++j;
            }
        }
        return total > 0 ? integral / total : std::numeric_limits<double>::infinity();
    }

    Stream similarity(const PhysicalOp& op) {
        Stream s = eval(op.children.at(0));
        const std::size_t col = need_attr(s.schema, op.attr);
        if (s.schema[col].kind != AttrKind::MPoint) exec_fail("similarity needs an mpoint attribute");
        Query q = resolve(op.object, s, op.attr);
        if (!q.moving) exec_fail("similarity needs a moving query object");
        std::vector<std::pair<double, std::size_t>> scored;
        for (auto i : candidates_of(s, q)) {
            double d = mean_distance(*q.moving, (*s.rows[i])[col].as_mpoint());
            if (std::isfinite(d)) scored.emplace_back(d, i);
        }
        std::sort(scored.begin(), scored.end());
        Stream out;
        out.schema = s.schema;
        out.origin = s.origin;
        out.schema.push_back({"rank", AttrKind::Int, false});
        out.schema.push_back({"distance", AttrKind::Real, false});
        for (std::size_t r = 0; r < scored.size() && r < static_cast<std::size_t>(op.k); ++r) {
            Tuple row = *s.rows[scored[r].second];
            row.push_back(Value(static_cast<std::int64_t>(r + 1)));
            row.push_back(Value(scored[r].first));
            out.rows.push_back(own(std::move(row)));
        }
        return out;
    }

    Stream spatialjoin(const PhysicalOp& op) {
        Stream l = eval(op.children.at(0));
        Stream r = eval(op.children.at(1));
        const std::size_t lc = need_attr(l.schema, op.attr);
        const std::size_t rc = need_attr(r.schema, op.attr2);
        if (op.fn != "intersects" && op.fn != "contains" && op.fn != "dist") exec_fail("unknown join predicate " + op.fn);

        Stream out;
        out.schema = l.schema;
        for (auto a : r.schema) {
            while (find_attr(out.schema, a.name)) a.name += "_2";
            out.schema.push_back(a);
        }
        const double slack = op.fn == "dist" ? op.dist : 0;
        std::vector<geo::Rect> rboxes;
        rboxes.reserve(r.rows.size());
        for (const Tuple* t : r.rows) rboxes.push_back((*t)[rc].bbox().value_or(geo::Rect::empty()));
        for (const Tuple* lt : l.rows) {
            const Val a = from_value((*lt)[lc]);
            const geo::Rect lbox = (*lt)[lc].bbox().value_or(geo::Rect::empty()).expanded(slack);
            for (std::size_t j = 0; j < r.rows.size(); ++j) {
                if (!lbox.intersects(rboxes[j])) continue;
                const Val b = from_value((*r.rows[j])[rc]);
                bool hit = op.fn == "intersects" ? fn_intersects(a, b)
                           : op.fn == "contains" ? fn_contains(a, b)
                                                 : fn_distance(a, b) <= op.dist;
                if (!hit) continue;
                Tuple row = *lt;
                row.insert(row.end(), r.rows[j]->begin(), r.rows[j]->end());
                out.rows.push_back(own(std::move(row)));
            }
        }
        return out;
    }

    ResultSet aggregate(const PhysicalOp& op) {
        Stream s = eval(op.children.at(0));
        ResultSet rs;
        rs.schema = {{op.fn + "_" + op.attr, op.fn == "count" ? AttrKind::Int : AttrKind::Real, false}};
        if (op.fn == "count") {
            rs.rows.push_back({Value(static_cast<std::int64_t>(s.rows.size()))});
            return rs;
        }
        if (op.fn != "avg" && op.fn != "max" && op.fn != "min" && op.fn != "sum") exec_fail("aggregate: unknown function " + op.fn);
        const std::size_t col = need_attr(s.schema, op.attr);
        if (s.rows.empty()) return rs;
        double acc = op.fn == "max" ? -std::numeric_limits<double>::infinity()
                     : op.fn == "min" ? std::numeric_limits<double>::infinity()
                                      : 0.0;
        for (const Tuple* t : s.rows) {
            double v = measure((*t)[col], op.attr);
            if (op.fn == "max") {
                acc = std::max(acc, v);
            } else if (op.fn == "min") {
                acc = std::min(acc, v);
            } else {
                acc += v;
            }
        }
        if (op.fn == "avg") acc /= static_cast<double>(s.rows.size());
        rs.rows.push_back({Value(acc)});
        return rs;
    }

    const catalog::Database& db_;
    std::deque<Tuple> arena_;
};

}  // namespace

Execution execute(const PhysicalPlan& p, const catalog::Database& db) {
    try {
        validate(p);
    } catch (const Error& e) {
        exec_fail(e.what());
    }
    auto t0 = std::chrono::steady_clock::now();
    Executor ex(db);
    Execution out;
    out.result = ex.run(p.root);
    out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

nlohmann::json rows_json(const ResultSet& rs) {
    nlohmann::json schema = nlohmann::json::array();
    for (const auto& a : rs.schema) schema.push_back({{"name", a.name}, {"kind", catalog::kind_name(a.kind)}});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : rs.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : t) {
            switch (v.kind()) {
                case AttrKind::Int: row.push_back(v.as_int()); break;
                case AttrKind::Real: row.push_back(v.as_real()); break;
                default: row.push_back(catalog::format_value(v)); break;
            }
        }
        rows.push_back(std::move(row));
    }
    return {{"schema", schema}, {"rows", rows}};
}

}  // namespace nlstplan::planner

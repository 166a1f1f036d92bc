#include "nlstplan/planner/plan.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

#include "nlstplan/error.h"
#include "nlstplan/geo/wkt.h"

namespace nlstplan::planner {

using nlohmann::json;

Expr Expr::attr(std::string name) {
    Expr e;
    e.kind = Kind::Attr;
    e.name = std::move(name);
    return e;
}

Expr Expr::literal(Literal v) {
    Expr e;
    e.kind = Kind::Literal;
    e.value = std::move(v);
    return e;
}

Expr Expr::call(std::string fn, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(fn);
    e.args = std::move(args);
    return e;
}

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.name = std::move(op);
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::negate(Expr inner) {
    Expr e;
    e.kind = Kind::Not;
    e.args.push_back(std::move(inner));
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name || a.args != b.args) return false;
    return a.kind != Expr::Kind::Literal || a.value == b.value;
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(const std::string& s) {
    if (s.empty() || !is_ident_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), is_ident_char);
}

std::string render_period(const geo::Period& p) {
    return "[" + std::to_string(p.start().ms) + ", " + std::to_string(p.end().ms) + ")";
}

std::string render_literal(const Expr::Literal& v) {
    struct V {
        std::string operator()(double d) const { return geo::format_number(d); }
        std::string operator()(const std::string& s) const { return quote(s); }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(const geo::Geometry& g) const { return geo::to_wkt(g); }
        std::string operator()(const geo::Period& p) const { return render_period(p); }
    };
    return std::visit(V{}, v);
}

std::string render_obj(const ObjRef& o) {
    if (o.point) return geo::to_wkt(geo::Geometry{*o.point});
    return is_identifier(o.name) ? o.name : quote(o.name);
}

std::string render_rect(const geo::Rect& r) {
    return "[" + geo::format_number(r.xmin) + " " + geo::format_number(r.ymin) + " " + geo::format_number(r.xmax) + " " +
           geo::format_number(r.ymax) + "]";
}

std::string render_join_pred(const PhysicalOp& op) {
    return op.fn == "dist" ? "dist<=" + geo::format_number(op.dist) : op.fn;
}

std::string render_stream(const PhysicalOp& op) {
    switch (op.kind) {
        case OpKind::Feed: return op.relation + " feed";
        case OpKind::WindowIntersects: return op.index + " " + op.relation + " windowintersects" + render_rect(op.rect);
        case OpKind::Filter:
            return render_stream(op.children.at(0)) + " filter [(" + render_expr(*op.predicate) + ")]";
        case OpKind::KNearest:
            return render_stream(op.children.at(0)) + " knearest[" + op.attr + ", " + render_obj(op.object) + ", " +
                   std::to_string(op.k) + "]";
        case OpKind::Similarity:
            return render_stream(op.children.at(0)) + " similarity[" + op.attr + ", " + render_obj(op.object) + ", " +
                   std::to_string(op.k) + "]";
        case OpKind::SpatialJoin:
            return render_stream(op.children.at(0)) + " " + render_stream(op.children.at(1)) + " spatialjoin[" +
                   op.attr + ", " + op.attr2 + ", " + render_join_pred(op) + "]";
        case OpKind::Project: {
            std::string out = render_stream(op.children.at(0)) + " project[";
            for (std::size_t i = 0; i < op.attrs.size(); ++i) out += (i ? ", " : "") + op.attrs[i];
            return out + "]";
        }
        case OpKind::Consume:
        case OpKind::Count:
        case OpKind::Aggregate: break;
    }
    throw Error(ErrorCode::InvalidArgument, "terminal operator inside a plan stream");
}

}  // namespace

std::string render_expr(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Attr: return "." + e.name;
        case Expr::Kind::Literal: return render_literal(e.value);
        case Expr::Kind::Call: {
            std::string out = e.name + "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + render_expr(e.args[i]);
            return out + ")";
        }
        case Expr::Kind::Binary: {
            auto side = [](const Expr& x) {
                return x.kind == Expr::Kind::Binary ? "(" + render_expr(x) + ")" : render_expr(x);
            };
            return side(e.args[0]) + " " + e.name + " " + side(e.args[1]);
        }
        case Expr::Kind::Not: return "not(" + render_expr(e.args[0]) + ")";
    }
    return {};
}

std::string_view op_name(OpKind k) {
    switch (k) {
        case OpKind::Feed: return "feed";
        case OpKind::WindowIntersects: return "windowintersects";
        case OpKind::Filter: return "filter";
        case OpKind::KNearest: return "knearest";
        case OpKind::SpatialJoin: return "spatialjoin";
        case OpKind::Similarity: return "similarity";
        case OpKind::Project: return "project";
        case OpKind::Consume: return "consume";
        case OpKind::Count: return "count";
        case OpKind::Aggregate: return "aggregate";
    }
    return "";
}

PhysicalOp PhysicalOp::feed(std::string relation) {
    PhysicalOp op;
    op.kind = OpKind::Feed;
    op.relation = std::move(relation);
    return op;
}

PhysicalOp PhysicalOp::window(std::string index, std::string relation, geo::Rect rect) {
    PhysicalOp op;
    op.kind = OpKind::WindowIntersects;
    op.index = std::move(index);
    op.relation = std::move(relation);
    op.rect = rect;
    return op;
}

namespace {
PhysicalOp unary(OpKind kind, PhysicalOp child) {
    PhysicalOp op;
    op.kind = kind;
    op.children.push_back(std::move(child));
    return op;
}
}  // namespace

PhysicalOp PhysicalOp::filter(PhysicalOp child, Expr predicate) {
    PhysicalOp op = unary(OpKind::Filter, std::move(child));
    op.predicate = std::move(predicate);
    return op;
}

PhysicalOp PhysicalOp::knearest(PhysicalOp child, std::string attr, ObjRef object, int k) {
    PhysicalOp op = unary(OpKind::KNearest, std::move(child));
    op.attr = std::move(attr);
    op.object = std::move(object);
    op.k = k;
    return op;
}

PhysicalOp PhysicalOp::spatialjoin(PhysicalOp left, PhysicalOp right, std::string left_attr, std::string right_attr,
                                   std::string fn, double dist) {
    PhysicalOp op;
    op.kind = OpKind::SpatialJoin;
    op.children.push_back(std::move(left));
    op.children.push_back(std::move(right));
    op.attr = std::move(left_attr);
    op.attr2 = std::move(right_attr);
    op.fn = std::move(fn);
    op.dist = dist;
    return op;
}

PhysicalOp PhysicalOp::similarity(PhysicalOp child, std::string attr, ObjRef object, int k) {
    PhysicalOp op = unary(OpKind::Similarity, std::move(child));
    op.attr = std::move(attr);
    op.object = std::move(object);
    op.k = k;
    return op;
}

PhysicalOp PhysicalOp::project(PhysicalOp child, std::vector<std::string> attrs) {
    PhysicalOp op = unary(OpKind::Project, std::move(child));
    op.attrs = std::move(attrs);
    return op;
}

PhysicalOp PhysicalOp::consume(PhysicalOp child) { return unary(OpKind::Consume, std::move(child)); }
PhysicalOp PhysicalOp::count(PhysicalOp child) { return unary(OpKind::Count, std::move(child)); }

PhysicalOp PhysicalOp::aggregate(PhysicalOp child, std::string fn, std::string attr) {
    PhysicalOp op = unary(OpKind::Aggregate, std::move(child));
    op.fn = std::move(fn);
    op.attr = std::move(attr);
    return op;
}

std::string PhysicalOp::index_attr() const {
    std::string s = index;
    const std::string prefix = relation + "_";
    constexpr std::string_view suffix = "_rtree";
    if (s.starts_with(prefix)) s = s.substr(prefix.size());
    if (s.ends_with(suffix)) s.resize(s.size() - suffix.size());
    return s;
}

bool operator==(const PhysicalOp& a, const PhysicalOp& b) {
    if (a.kind != b.kind || a.children != b.children) return false;
    switch (a.kind) {
        case OpKind::Feed: return a.relation == b.relation;
        case OpKind::WindowIntersects: return a.relation == b.relation && a.index == b.index && a.rect == b.rect;
        case OpKind::Filter: return a.predicate == b.predicate;
        case OpKind::KNearest:
        case OpKind::Similarity: return a.attr == b.attr && a.object == b.object && a.k == b.k;
        case OpKind::SpatialJoin:
            return a.attr == b.attr && a.attr2 == b.attr2 && a.fn == b.fn && (a.fn != "dist" || a.dist == b.dist);
        case OpKind::Project: return a.attrs == b.attrs;
        case OpKind::Aggregate: return a.fn == b.fn && a.attr == b.attr;
        case OpKind::Consume:
        case OpKind::Count: return true;
    }
    return false;
}

std::vector<std::string> PhysicalPlan::sources() const {
    std::vector<std::string> out;
    std::function<void(const PhysicalOp&)> walk = [&](const PhysicalOp& op) {
        if (op.kind == OpKind::Feed || op.kind == OpKind::WindowIntersects) out.push_back(op.relation);
        for (const auto& c : op.children) walk(c);
    };
    walk(root);
    return out;
}

bool PhysicalPlan::uses_index() const {
    std::function<bool(const PhysicalOp&)> walk = [&](const PhysicalOp& op) {
        if (op.kind == OpKind::WindowIntersects) return true;
        return std::any_of(op.children.begin(), op.children.end(), walk);
    };
    return walk(root);
}

void validate(const PhysicalPlan& p) {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, "invalid plan: " + m); };
    std::function<void(const PhysicalOp&, bool)> walk = [&](const PhysicalOp& op, bool is_root) {
        const bool terminal = op.kind == OpKind::Consume || op.kind == OpKind::Count || op.kind == OpKind::Aggregate;
        if (terminal != is_root) fail(is_root ? "root must be consume, count or aggregate" : "terminal below the root");
        std::size_t want = 1;
        if (op.kind == OpKind::Feed || op.kind == OpKind::WindowIntersects) want = 0;
        if (op.kind == OpKind::SpatialJoin) want = 2;
        if (op.children.size() != want) fail(std::string(op_name(op.kind)) + " has the wrong number of inputs");
        if (op.kind == OpKind::Filter && !op.predicate) fail("filter without predicate");
        if ((op.kind == OpKind::KNearest || op.kind == OpKind::Similarity) && op.k < 1) fail("k must be >= 1");
        for (const auto& c : op.children) walk(c, false);
    };
    walk(p.root, true);
}

std::string render_plan(const PhysicalPlan& p) {
    validate(p);
    const PhysicalOp& r = p.root;
    std::string out = "query " + render_stream(r.children.at(0)) + " ";
    switch (r.kind) {
        case OpKind::Consume: out += "consume"; break;
        case OpKind::Count: out += "count"; break;
        default: out += "aggregate[" + r.fn + ", " + r.attr + "]"; break;
    }
    return out + ";";
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    PhysicalPlan plan() {
        expect_word("query");
        std::vector<PhysicalOp> stack;
        while (true) {
            skip_ws();
            std::size_t at = pos_;
            std::string word = ident();
            if (word.empty()) fail_here();
            if (word == "consume" || word == "count" || word == "aggregate") {
                if (stack.size() != 1) fail(at, word, "terminal needs exactly one input stream");
                PhysicalOp root;
                if (word == "consume") {
                    root = PhysicalOp::consume(std::move(stack.back()));
                } else if (word == "count") {
                    root = PhysicalOp::count(std::move(stack.back()));
                } else {
                    expect('[');
                    std::string fn = need_ident();
                    expect(',');
                    std::string attr = need_ident();
                    expect(']');
                    root = PhysicalOp::aggregate(std::move(stack.back()), fn, attr);
                }
                expect(';');
                skip_ws();
                if (pos_ != text_.size()) fail_here();
                return PhysicalPlan{std::move(root)};
            }
            if (word == "filter" || word == "knearest" || word == "similarity" || word == "project") {
                if (stack.empty()) fail(at, word, word + " needs an input stream");
                stack.back() = unary_op(word, std::move(stack.back()));
            } else if (word == "spatialjoin") {
                if (stack.size() < 2) fail(at, word, "spatialjoin needs two input streams");
                PhysicalOp right = std::move(stack.back());
                stack.pop_back();
                PhysicalOp left = std::move(stack.back());
                stack.pop_back();
                expect('[');
                std::string la = need_ident();
                expect(',');
                std::string ra = need_ident();
                expect(',');
                std::string pred = need_ident();
                double d = 0;
                if (pred == "dist") {
                    expect('<');
                    expect('=');
                    d = number();
                } else if (pred != "intersects" && pred != "contains") {
                    fail(last_, pred, "unknown join predicate");
                }
                expect(']');
                stack.push_back(PhysicalOp::spatialjoin(std::move(left), std::move(right), la, ra, pred, d));
            } else {
                stack.push_back(source(word));
            }
        }
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& token, const std::string& why) {
        throw PlanSyntaxError(at, token, "plan syntax error at offset " + std::to_string(at) + " near '" + token + "': " + why);
    }

    [[noreturn]] void fail_here() {
        skip_ws();
        std::size_t end = pos_;
        while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
        std::string tok(text_.substr(pos_, end - pos_));
        fail(pos_, tok.empty() ? "<end>" : tok, "unexpected token");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string ident() {
        skip_ws();
        last_ = pos_;
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) return {};
        std::size_t b = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(b, pos_ - b));
    }

    std::string need_ident() {
        std::string s = ident();
        if (s.empty()) fail_here();
        return s;
    }

    void expect_word(std::string_view w) {
        std::size_t save = pos_;
        if (ident() != w) {
            pos_ = save;
            fail_here();
        }
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c) {
        if (!accept(c)) fail_here();
    }

    double number() {
        skip_ws();
        std::size_t b = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
                text_[pos_] == 'E' || ((text_[pos_] == '-' || text_[pos_] == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        double v = 0;
        auto [p, ec] = std::from_chars(text_.data() + b, text_.data() + pos_, v);
        if (ec != std::errc() || p != text_.data() + pos_ || pos_ == b) {
            pos_ = b;
            fail_here();
        }
        return v;
    }

    std::int64_t integer() {
        std::size_t at = (skip_ws(), pos_);
        double v = number();
        if (v != std::floor(v)) fail(at, std::string(text_.substr(at, pos_ - at)), "expected an integer");
        return static_cast<std::int64_t>(v);
    }

    std::string quoted() {
        expect('"');
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
            out += text_[pos_++];
        }
        if (pos_ >= text_.size()) fail(pos_, "<end>", "unterminated string");
        ++pos_;
        return out;
    }

    geo::Geometry wkt() {
        skip_ws();
        std::size_t at = pos_;
        try {
            auto v = geo::parse_spatial_prefix(text_, pos_);
            if (auto* g = std::get_if<geo::Geometry>(&v)) return std::move(*g);
        } catch (const Error& e) {
            fail(at, std::string(text_.substr(at, 12)), e.what());
        }
        fail(at, "MPOINT", "moving literals are not allowed here");
    }

    static bool is_wkt_word(std::string_view w) { return w == "POINT" || w == "LINESTRING" || w == "POLYGON"; }

    std::string peek_ident() {
        std::size_t save = pos_;
        std::string w = ident();
        pos_ = save;
        return w;
    }

    ObjRef obj() {
        ObjRef o;
        if (peek('"')) {
            o.name = quoted();
        } else if (peek_ident() == "POINT") {
            o.point = std::get<geo::Point>(wkt());
        } else {
            o.name = need_ident();
        }
        return o;
    }

    int positive_int() {
        std::size_t at = (skip_ws(), pos_);
        auto v = integer();
        if (v < 1 || v > 1000000) fail(at, std::to_string(v), "expected a positive count");
        return static_cast<int>(v);
    }

    PhysicalOp unary_op(const std::string& word, PhysicalOp child) {
        if (word == "filter") {
            expect('[');
            expect('(');
            Expr e = expr();
            expect(')');
            expect(']');
            return PhysicalOp::filter(std::move(child), std::move(e));
        }
        if (word == "project") {
            expect('[');
            std::vector<std::string> attrs{need_ident()};
            while (accept(',')) attrs.push_back(need_ident());
            expect(']');
            return PhysicalOp::project(std::move(child), std::move(attrs));
        }
        expect('[');
        std::string attr = need_ident();
        expect(',');
        ObjRef o = obj();
        expect(',');
        int k = positive_int();
        expect(']');
        return word == "knearest" ? PhysicalOp::knearest(std::move(child), attr, std::move(o), k)
                                  : PhysicalOp::similarity(std::move(child), attr, std::move(o), k);
    }

    PhysicalOp source(const std::string& name) {
        std::size_t save = pos_;
        std::string next = ident();
        if (next == "feed") return PhysicalOp::feed(name);
        if (name.ends_with("_rtree") && !next.empty()) {
            std::string rel = next;
            std::size_t at = pos_;
            if (ident() != "windowintersects") {
                pos_ = at;
                fail_here();
            }
            expect('[');
            geo::Rect r;
            r.xmin = number();
            r.ymin = number();
            r.xmax = number();
            r.ymax = number();
            expect(']');
            return PhysicalOp::window(name, rel, r);
        }
        pos_ = save;
        fail_here();
    }

    // pred := and_expr ("or" and_expr)*
    Expr expr() {
        Expr lhs = and_expr();
        while (peek_ident() == "or") {
            ident();
            lhs = Expr::binary("or", std::move(lhs), and_expr());
        }
        return lhs;
    }

    Expr and_expr() {
        Expr lhs = cmp_expr();
        while (peek_ident() == "and") {
            ident();
            lhs = Expr::binary("and", std::move(lhs), cmp_expr());
        }
        return lhs;
    }

    Expr cmp_expr() {
        Expr lhs = primary();
        skip_ws();
        std::string op;
        if (text_.substr(pos_).starts_with("<=") || text_.substr(pos_).starts_with(">=")) {
            op = std::string(text_.substr(pos_, 2));
            pos_ += 2;
        } else if (pos_ < text_.size() && std::string_view("<>=#").find(text_[pos_]) != std::string_view::npos) {
            op = std::string(1, text_[pos_++]);
        } else if (peek_ident() == "intersects") {
            op = ident();
        } else {
            return lhs;
        }
        return Expr::binary(op, std::move(lhs), primary());
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail_here();
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (c == '.') {
            ++pos_;
            return Expr::attr(need_ident());
        }
        if (c == '"') return Expr::literal(quoted());
        if (c == '[') {
            ++pos_;
            std::size_t at = (skip_ws(), pos_);
            auto s = integer();
            expect(',');
            auto e = integer();
            expect(')');
            if (s < 0 || s >= e) fail(at, std::to_string(s), "empty or negative period");
            return Expr::literal(geo::Period(s, e));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') return Expr::literal(number());
        std::string w = peek_ident();
        if (w.empty()) fail_here();
        if (is_wkt_word(w)) return Expr::literal(wkt());
        ident();
        if (w == "TRUE") return Expr::literal(true);
        if (w == "FALSE") return Expr::literal(false);
        if (w == "not") {
            expect('(');
            Expr e = expr();
            expect(')');
            return Expr::negate(std::move(e));
        }
        expect('(');
        std::vector<Expr> args;
        if (!peek(')')) {
            args.push_back(expr());
            while (accept(',')) args.push_back(expr());
        }
        expect(')');
        return Expr::call(w, std::move(args));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t last_ = 0;
};

json obj_json(const ObjRef& o) {
    if (o.point) return geo::to_wkt(geo::Geometry{*o.point});
    return o.name;
}

json tree(const PhysicalOp& op) {
    json params = json::object();
    switch (op.kind) {
        case OpKind::Feed: params["relation"] = op.relation; break;
        case OpKind::WindowIntersects:
            params["index"] = op.index;
            params["relation"] = op.relation;
            params["rect"] = {op.rect.xmin, op.rect.ymin, op.rect.xmax, op.rect.ymax};
            break;
        case OpKind::Filter: params["predicate"] = render_expr(*op.predicate); break;
        case OpKind::KNearest:
        case OpKind::Similarity:
            params["attr"] = op.attr;
            params["object"] = obj_json(op.object);
            params["k"] = op.k;
            break;
        case OpKind::SpatialJoin:
            params["left"] = op.attr;
            params["right"] = op.attr2;
            params["predicate"] = render_join_pred(op);
            break;
        case OpKind::Project: params["attrs"] = op.attrs; break;
        case OpKind::Aggregate:
            params["fn"] = op.fn;
            params["attr"] = op.attr;
            break;
        case OpKind::Consume:
        case OpKind::Count: break;
    }
    json children = json::array();
    for (const auto& c : op.children) children.push_back(tree(c));
    return json{{"op", op_name(op.kind)}, {"params", params}, {"children", children}};
}

}  // namespace

PhysicalPlan parse_plan(std::string_view text) { return Parser(text).plan(); }

json plan_tree(const PhysicalPlan& p) { return tree(p.root); }

}  // namespace nlstplan::planner

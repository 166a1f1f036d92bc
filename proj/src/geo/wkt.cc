#include "nlstplan/geo/wkt.h"

#include <cctype>
#include <charconv>
#include <cmath>

#include "nlstplan/error.h"

namespace nlstplan::geo {

std::string format_number(double v) {
    if (v == 0) return "0";  // folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void append_point(std::string& out, Point p) {
    out += format_number(p.x);
    out += ' ';
    out += format_number(p.y);
}

void append_ring(std::string& out, const Ring& ring) {
    out += '(';
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i) out += ", ";
        append_point(out, ring[i]);
    }
    out += ')';
}

}  // namespace

std::string to_wkt(const Geometry& g) {
    std::string out;
    if (const auto* p = std::get_if<Point>(&g)) {
        out = "POINT (";
        append_point(out, *p);
        out += ')';
    } else if (const auto* l = std::get_if<Line>(&g)) {
        out = "LINESTRING (";
        const auto& segs = l->segments();
        append_point(out, segs.front().a);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            // disjoint consecutive segments are not representable; emit the joint vertex
            out += ", ";
            if (i > 0 && segs[i].a != segs[i - 1].b) {
                append_point(out, segs[i].a);
                out += ", ";
            }
            append_point(out, segs[i].b);
        }
        out += ')';
    } else {
        const auto& r = std::get<Region>(g);
        out = "POLYGON (";
        for (std::size_t i = 0; i < r.rings().size(); ++i) {
            if (i) out += ", ";
            append_ring(out, r.rings()[i]);
        }
        out += ')';
    }
    return out;
}

std::string to_text(const MovingPoint& m) {
    if (m.empty()) return "MPOINT EMPTY";
    std::string out = "MPOINT (";
    for (std::size_t i = 0; i < m.units().size(); ++i) {
        const auto& u = m.units()[i];
        if (i) out += ", ";
        out += '(';
        out += std::to_string(u.period.start().ms);
        out += ' ';
        out += std::to_string(u.period.end().ms);
        out += ' ';
        append_point(out, u.p0);
        out += ' ';
        append_point(out, u.p1);
        out += ')';
    }
    out += ')';
    return out;
}

namespace {

class Cursor {
public:
    Cursor(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

    std::size_t pos() const { return pos_; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool try_char(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!try_char(c)) fail(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string w(text_.substr(start, pos_ - start));
        for (auto& c : w) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return w;
    }
    double number() {
        skip_ws();
        double v = 0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        if (begin < end && *begin == '+') ++begin;
        auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || !std::isfinite(v)) fail("expected number");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        return v;
    }
    std::int64_t integer() {
        skip_ws();
        std::int64_t v = 0;
        auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (res.ec != std::errc()) fail("expected integer");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        return v;
    }
    Point point() {
        double x = number();
        double y = number();
        return {x, y};
    }
    std::vector<Point> point_list() {
        std::vector<Point> pts;
        expect('(');
        do {
            pts.push_back(point());
        } while (try_char(','));
        expect(')');
        return pts;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::BadEncoding, what + " at offset " + std::to_string(pos_));
    }

private:
    std::string_view text_;
    std::size_t pos_;
};

}  // namespace

SpatialValue parse_spatial_prefix(std::string_view text, std::size_t& pos) {
    Cursor c(text, pos);
    std::string kind = c.word();
    SpatialValue out;
    if (kind == "POINT") {
        c.expect('(');
        Point p = c.point();
        c.expect(')');
        out = Geometry{p};
    } else if (kind == "LINESTRING") {
        out = Geometry{Line::from_vertices(c.point_list())};
    } else if (kind == "POLYGON") {
        std::vector<Ring> rings;
        c.expect('(');
        do {
            rings.push_back(c.point_list());
        } while (c.try_char(','));
        c.expect(')');
        out = Geometry{Region(std::move(rings))};
    } else if (kind == "MPOINT") {
        std::size_t save = c.pos();
        if (c.word() == "EMPTY") {
            out = MovingPoint{};
        } else {
            c = Cursor(text, save);
            std::vector<UnitPoint> units;
            c.expect('(');
            do {
                c.expect('(');
                std::int64_t t0 = c.integer();
                std::int64_t t1 = c.integer();
                Point p0 = c.point();
                Point p1 = c.point();
                c.expect(')');
                units.push_back({Period(t0, t1), p0, p1});
            } while (c.try_char(','));
            c.expect(')');
            out = MovingPoint(std::move(units));
        }
    } else {
        c.fail("unknown geometry kind '" + kind + "'");
    }
    pos = c.pos();
    return out;
}

namespace {

SpatialValue parse_whole(std::string_view text) {
    std::size_t pos = 0;
    SpatialValue v = parse_spatial_prefix(text, pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) {
        throw Error(ErrorCode::BadEncoding, "trailing characters at offset " + std::to_string(pos));
    }
    return v;
}

}  // namespace

Geometry parse_wkt(std::string_view text) {
    auto v = parse_whole(text);
    if (auto* g = std::get_if<Geometry>(&v)) return std::move(*g);
    throw Error(ErrorCode::BadEncoding, "expected a geometry, got MPOINT");
}

MovingPoint parse_mpoint(std::string_view text) {
    auto v = parse_whole(text);
    if (auto* m = std::get_if<MovingPoint>(&v)) return std::move(*m);
    throw Error(ErrorCode::BadEncoding, "expected MPOINT");
}

}  // namespace nlstplan::geo

#include "nlstplan/catalog/value.h"

#include <charconv>
#include <cstdlib>

#include "nlstplan/error.h"
#include "nlstplan/geo/wkt.h"

namespace nlstplan::catalog {

namespace {

constexpr std::string_view kKindNames[] = {"int", "real", "text", "point", "line", "region", "mpoint", "instant", "period"};

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::BadEncoding, "not an integer: '" + std::string(s) + "'");
    }
    return v;
}

double parse_real(std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::BadEncoding, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
bool deep_equal(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
    return a == b || (a && b && *a == *b);
}

}  // namespace

std::string_view kind_name(AttrKind k) { return kKindNames[static_cast<int>(k)]; }

AttrKind parse_kind(std::string_view name) {
    for (int i = 0; i < 9; ++i) {
        if (kKindNames[i] == name) return static_cast<AttrKind>(i);
    }
    throw Error(ErrorCode::SchemaMismatch, "unknown attribute kind '" + std::string(name) + "'");
}

bool is_spatial(AttrKind k) { return k == AttrKind::Point || k == AttrKind::Line || k == AttrKind::Region; }
bool is_numeric(AttrKind k) { return k == AttrKind::Int || k == AttrKind::Real; }

Value Value::of_geometry(const geo::Geometry& g) {
    return std::visit([](const auto& x) { return Value(x); }, g);
}

std::optional<geo::Geometry> Value::geometry() const {
    switch (kind()) {
        case AttrKind::Point: return geo::Geometry{as_point()};
        case AttrKind::Line: return geo::Geometry{as_line()};
        case AttrKind::Region: return geo::Geometry{as_region()};
        default: return std::nullopt;
    }
}

std::optional<geo::Rect> Value::bbox() const {
    switch (kind()) {
        case AttrKind::Point: return geo::Rect::of(as_point());
        case AttrKind::Line: return as_line().bbox();
        case AttrKind::Region: return as_region().bbox();
        case AttrKind::MPoint:
            if (as_mpoint().empty()) return std::nullopt;
            return as_mpoint().bbox();
        default: return std::nullopt;
    }
}

bool operator==(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return false;
    switch (a.kind()) {
        case AttrKind::Line:
            return deep_equal(std::get<std::shared_ptr<const geo::Line>>(a.v_), std::get<std::shared_ptr<const geo::Line>>(b.v_));
        case AttrKind::Region:
            return deep_equal(std::get<std::shared_ptr<const geo::Region>>(a.v_),
                              std::get<std::shared_ptr<const geo::Region>>(b.v_));
        case AttrKind::MPoint:
            return deep_equal(std::get<std::shared_ptr<const geo::MovingPoint>>(a.v_),
                              std::get<std::shared_ptr<const geo::MovingPoint>>(b.v_));
        default: return a.v_ == b.v_;
    }
}

std::string format_value(const Value& v) {
    switch (v.kind()) {
        case AttrKind::Int: return std::to_string(v.as_int());
        case AttrKind::Real: return geo::format_number(v.as_real());
        case AttrKind::Text: return v.as_text();
        case AttrKind::Point:
        case AttrKind::Line:
        case AttrKind::Region: return geo::to_wkt(*v.geometry());
        case AttrKind::MPoint: return geo::to_text(v.as_mpoint());
        case AttrKind::Instant: return std::to_string(v.as_instant().ms);
        case AttrKind::Period: {
            auto p = v.as_period();
            return "[" + std::to_string(p.start().ms) + ", " + std::to_string(p.end().ms) + ")";
        }
    }
    return {};
}

Value parse_value(AttrKind kind, std::string_view text) {
    switch (kind) {
        case AttrKind::Int: return Value(parse_int(trim(text)));
        case AttrKind::Real: return Value(parse_real(trim(text)));
        case AttrKind::Text: return Value(std::string(text));
        case AttrKind::Point:
        case AttrKind::Line:
        case AttrKind::Region: {
            geo::Geometry g = geo::parse_wkt(text);
            if (static_cast<int>(g.index()) != static_cast<int>(kind) - static_cast<int>(AttrKind::Point)) {
                throw Error(ErrorCode::BadEncoding, "geometry is not a " + std::string(kind_name(kind)));
            }
            return Value::of_geometry(g);
        }
        case AttrKind::MPoint: return Value(geo::parse_mpoint(text));
        case AttrKind::Instant: return Value(geo::Instant{parse_int(trim(text))});
        case AttrKind::Period: {
            std::string_view s = trim(text);
            if (s.size() < 5 || s.front() != '[' || s.back() != ')') {
                throw Error(ErrorCode::BadEncoding, "period must look like [start, end)");
            }
            s = s.substr(1, s.size() - 2);
            auto comma = s.find(',');
            if (comma == std::string_view::npos) throw Error(ErrorCode::BadEncoding, "period needs two instants");
            return Value(geo::Period(parse_int(trim(s.substr(0, comma))), parse_int(trim(s.substr(comma + 1)))));
        }
    }
    throw Error(ErrorCode::BadEncoding, "unknown kind");
}

}  // namespace nlstplan::catalog

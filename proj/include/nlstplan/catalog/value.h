#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::catalog {

/// Attribute kinds. The order matches the alternatives of Value::Storage.
enum class AttrKind { Int, Real, Text, Point, Line, Region, MPoint, Instant, Period };

std::string_view kind_name(AttrKind k);
/// Throws SchemaMismatch for an unknown name.
AttrKind parse_kind(std::string_view name);

bool is_spatial(AttrKind k);   // point, line, region
bool is_numeric(AttrKind k);   // int, real

/// One cell. Heavy geometries are shared so tuples copy cheaply.
class Value {
public:
    using Storage = std::variant<std::int64_t, double, std::string, geo::Point, std::shared_ptr<const geo::Line>,
                                 std::shared_ptr<const geo::Region>, std::shared_ptr<const geo::MovingPoint>,
                                 geo::Instant, geo::Period>;

    Value() : v_(std::int64_t{0}) {}
    explicit Value(std::int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    explicit Value(geo::Point p) : v_(p) {}
    explicit Value(geo::Line l) : v_(std::make_shared<const geo::Line>(std::move(l))) {}
    explicit Value(geo::Region r) : v_(std::make_shared<const geo::Region>(std::move(r))) {}
    explicit Value(geo::MovingPoint m) : v_(std::make_shared<const geo::MovingPoint>(std::move(m))) {}
    explicit Value(geo::Instant t) : v_(t) {}
    explicit Value(geo::Period p) : v_(p) {}
    static Value of_geometry(const geo::Geometry& g);

    AttrKind kind() const { return static_cast<AttrKind>(v_.index()); }
    const Storage& storage() const { return v_; }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_real() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    geo::Point as_point() const { return std::get<geo::Point>(v_); }
    const geo::Line& as_line() const { return *std::get<std::shared_ptr<const geo::Line>>(v_); }
    const geo::Region& as_region() const { return *std::get<std::shared_ptr<const geo::Region>>(v_); }
    const geo::MovingPoint& as_mpoint() const { return *std::get<std::shared_ptr<const geo::MovingPoint>>(v_); }
    geo::Instant as_instant() const { return std::get<geo::Instant>(v_); }
    geo::Period as_period() const { return std::get<geo::Period>(v_); }

    /// Point, line or region as a Geometry; nullopt for other kinds.
    std::optional<geo::Geometry> geometry() const;
    /// MBR of a spatial or moving value; nullopt otherwise.
    std::optional<geo::Rect> bbox() const;

    /// Deep equality (shared geometries compare by content).
    friend bool operator==(const Value& a, const Value& b);

private:
    Storage v_;
};

using Tuple = std::vector<Value>;

/// Cell text as stored in relation files: plain numbers, raw text, WKT, MPOINT text,
/// instants as ms, periods as `[start, end)`.
std::string format_value(const Value& v);

/// Inverse of format_value for a declared kind. Throws BadEncoding / InvalidGeometry.
Value parse_value(AttrKind kind, std::string_view text);

}  // namespace nlstplan::catalog

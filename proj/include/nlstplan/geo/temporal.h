#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "nlstplan/geo/geometry.h"

namespace nlstplan::geo {

/// Milliseconds since the dataset epoch (day 0, 00:00).
struct Instant {
    std::int64_t ms = 0;

    friend auto operator<=>(const Instant&, const Instant&) = default;
};

/// Half-open time interval [start, end).
class Period {
public:
    Period() = default;
    /// Throws InvalidGeometry unless 0 <= start < end.
    Period(Instant start, Instant end);
    Period(std::int64_t start_ms, std::int64_t end_ms) : Period(Instant{start_ms}, Instant{end_ms}) {}

    Instant start() const { return start_; }
    Instant end() const { return end_; }
    std::int64_t duration_ms() const { return end_.ms - start_.ms; }
    bool contains(Instant t) const { return start_ <= t && t < end_; }
    bool intersects(const Period& o) const { return start_ < o.end_ && o.start_ < end_; }
    /// Intersection, or nullopt when the periods are disjoint.
    std::optional<Period> intersection(const Period& o) const;

    friend auto operator<=>(const Period&, const Period&) = default;

private:
    Instant start_{0};
    Instant end_{1};
};

/// Linear motion from p0 at period.start to p1 at period.end.
struct UnitPoint {
    Period period;
    Point p0;
    Point p1;

    Point at(double t_ms) const;
    friend bool operator==(const UnitPoint&, const UnitPoint&) = default;
};

/// Trajectory: units sorted by start time with pairwise disjoint periods.
class MovingPoint {
public:
    MovingPoint() = default;
    /// Throws InvalidGeometry when units are unsorted or overlap.
    explicit MovingPoint(std::vector<UnitPoint> units);
    /// A point that stays at `p` for the whole period.
    static MovingPoint stationary(Point p, Period period);

    const std::vector<UnitPoint>& units() const { return units_; }
    bool empty() const { return units_.empty(); }
    Rect bbox() const;

    friend bool operator==(const MovingPoint&, const MovingPoint&) = default;

private:
    std::vector<UnitPoint> units_;
};

/// Position at t, absent when no unit covers t.
std::optional<Point> mpoint_at(const MovingPoint& m, Instant t);
/// Same, for a real-valued time (used when sampling event midpoints).
std::optional<Point> mpoint_at(const MovingPoint& m, double t_ms);
/// Minimal list of maximal periods covered by the units.
std::vector<Period> deftime(const MovingPoint& m);
/// Motion of m restricted to p, units clipped with interpolated endpoints.
MovingPoint atperiods(const MovingPoint& m, const Period& p);
MovingPoint atperiods(const MovingPoint& m, const std::vector<Period>& periods);

}  // namespace nlstplan::geo

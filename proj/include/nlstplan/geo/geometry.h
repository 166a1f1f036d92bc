#pragma once

#include <compare>
#include <limits>
#include <variant>
#include <vector>

namespace nlstplan::geo {

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Segment {
    Point a;
    Point b;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Minimum bounding rectangle. Closed on all sides.
struct Rect {
    double xmin = 0;
    double ymin = 0;
    double xmax = 0;
    double ymax = 0;

    friend bool operator==(const Rect&, const Rect&) = default;

    static Rect of(Point p) { return {p.x, p.y, p.x, p.y}; }
    /// Identity element for `extend`.
    static Rect empty() {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, -inf, -inf};
    }

    bool is_empty() const { return xmin > xmax || ymin > ymax; }
    bool intersects(const Rect& o) const {
        return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
    }
    bool contains(const Rect& o) const {
        return xmin <= o.xmin && o.xmax <= xmax && ymin <= o.ymin && o.ymax <= ymax;
    }
    void extend(const Rect& o) {
        if (o.xmin < xmin) xmin = o.xmin;
        if (o.ymin < ymin) ymin = o.ymin;
        if (o.xmax > xmax) xmax = o.xmax;
        if (o.ymax > ymax) ymax = o.ymax;
    }
    void extend(Point p) { extend(of(p)); }
    Rect expanded(double d) const { return {xmin - d, ymin - d, xmax + d, ymax + d}; }
    Point center() const { return {(xmin + xmax) / 2, (ymin + ymax) / 2}; }
};

/// Polyline made of one or more non-degenerate segments.
class Line {
public:
    Line() = default;
    /// Throws InvalidGeometry on an empty list, a zero-length segment or a non-finite coordinate.
    explicit Line(std::vector<Segment> segments);
    /// Convenience: consecutive vertices become segments.
    static Line from_vertices(const std::vector<Point>& vertices);

    const std::vector<Segment>& segments() const { return segments_; }
    Rect bbox() const { return bbox_; }
    double length() const;

    friend bool operator==(const Line& a, const Line& b) { return a.segments_ == b.segments_; }

private:
    std::vector<Segment> segments_;
    Rect bbox_ = Rect::empty();
};

using Ring = std::vector<Point>;

/// Polygon with holes. Rings are stored closed (first vertex repeated at the end).
class Region {
public:
    Region() = default;
    /// Throws InvalidGeometry when a ring is open, has < 3 distinct vertices, or the outer ring
    /// self-intersects.
    explicit Region(std::vector<Ring> rings);

    const std::vector<Ring>& rings() const { return rings_; }
    const Ring& outer() const { return rings_.front(); }
    Rect bbox() const { return bbox_; }
    /// Outer area minus hole areas.
    double area() const;

    friend bool operator==(const Region& a, const Region& b) { return a.rings_ == b.rings_; }

private:
    std::vector<Ring> rings_;
    Rect bbox_ = Rect::empty();
};

using Geometry = std::variant<Point, Line, Region>;

bool is_finite(Point p);
Rect bbox(const Geometry& g);
/// Deterministic representative point: the point itself, otherwise the MBR center.
Point anchor(const Geometry& g);

}  // namespace nlstplan::geo

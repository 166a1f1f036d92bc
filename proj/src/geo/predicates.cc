#include "nlstplan/geo/predicates.h"

#include <algorithm>
#include <cmath>

#include "nlstplan/error.h"

namespace nlstplan::geo {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int sign(double v) { return (v > 0) - (v < 0); }

bool on_segment(Point p, const Segment& s) {
    if (cross(s.a, s.b, p) != 0) return false;
    return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
           std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

bool on_ring(const Ring& ring, Point p) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (on_segment(p, {ring[i], ring[i + 1]})) return true;
    }
    return false;
}

/// Even-odd ray casting towards +x; boundary handled by the caller.
bool ray_inside(const Ring& ring, Point p) {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

bool contains(const Region& r, Point p) {
    if (!r.bbox().intersects(Rect::of(p))) return false;
    for (const auto& ring : r.rings()) {
        if (on_ring(ring, p)) return true;
    }
    if (!ray_inside(r.outer(), p)) return false;
    for (std::size_t h = 1; h < r.rings().size(); ++h) {
        if (ray_inside(r.rings()[h], p)) return false;
    }
    return true;
}

bool segments_intersect(const Segment& s, const Segment& t) {
    int d1 = sign(cross(t.a, t.b, s.a));
    int d2 = sign(cross(t.a, t.b, s.b));
    int d3 = sign(cross(s.a, s.b, t.a));
    int d4 = sign(cross(s.a, s.b, t.b));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    return (d1 == 0 && on_segment(s.a, t)) || (d2 == 0 && on_segment(s.b, t)) ||
           (d3 == 0 && on_segment(t.a, s)) || (d4 == 0 && on_segment(t.b, s));
}

namespace {

bool segment_crosses_region_boundary(const Segment& s, const Region& r) {
    for (const auto& ring : r.rings()) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            if (segments_intersect(s, {ring[i], ring[i + 1]})) return true;
        }
    }
    return false;
}

}  // namespace

bool intersects(const Line& l, const Region& r) {
    if (!l.bbox().intersects(r.bbox())) return false;
    for (const auto& s : l.segments()) {
        if (contains(r, s.a) || segment_crosses_region_boundary(s, r)) return true;
    }
    return false;
}

bool intersects(const Region& a, const Region& b) {
    if (!a.bbox().intersects(b.bbox())) return false;
    for (const auto& ring : a.rings()) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            if (segment_crosses_region_boundary({ring[i], ring[i + 1]}, b)) return true;
        }
    }
    // No boundary crossings: either nested or disjoint (or a inside a hole of b).
    return contains(b, a.outer().front()) || contains(a, b.outer().front());
}

namespace {

struct IntersectsVisitor {
    bool operator()(const Period& x, const Period& y) const { return x.intersects(y); }
    bool operator()(const Region& x, const Region& y) const { return intersects(x, y); }
    bool operator()(const Line& x, const Region& y) const { return intersects(x, y); }
    bool operator()(const Region& x, const Line& y) const { return intersects(y, x); }
    bool operator()(const Point& x, const Region& y) const { return contains(y, x); }
    bool operator()(const Region& x, const Point& y) const { return contains(x, y); }
    template <typename A, typename B>
    bool operator()(const A&, const B&) const {
        throw Error(ErrorCode::IncompatibleOperands, "intersects: unsupported operand pair");
    }
};

}  // namespace

bool intersects(const Intersectable& a, const Intersectable& b) { return std::visit(IntersectsVisitor{}, a, b); }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance(Point p, const Segment& s) {
    double dx = s.b.x - s.a.x;
    double dy = s.b.y - s.a.y;
    double len2 = dx * dx + dy * dy;
    if (len2 == 0) return distance(p, s.a);
    double t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, Point{s.a.x + t * dx, s.a.y + t * dy});
}

double distance(Point p, const Geometry& g) {
    if (const auto* q = std::get_if<Point>(&g)) return distance(p, *q);
    double best = std::numeric_limits<double>::infinity();
    if (const auto* l = std::get_if<Line>(&g)) {
        for (const auto& s : l->segments()) best = std::min(best, distance(p, s));
        return best;
    }
    const auto& r = std::get<Region>(g);
    if (contains(r, p)) return 0;
    for (const auto& ring : r.rings()) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) best = std::min(best, distance(p, Segment{ring[i], ring[i + 1]}));
    }
    return best;
}

double length(const Line& l) {
    double total = 0;
    for (const auto& s : l.segments()) total += distance(s.a, s.b);
    return total;
}

namespace {

double ring_area(const Ring& ring) {
    double twice = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    }
    return std::abs(twice) / 2;
}

}  // namespace

double area(const Region& r) {
    double a = ring_area(r.outer());
    for (std::size_t h = 1; h < r.rings().size(); ++h) a -= ring_area(r.rings()[h]);
    return a;
}

}  // namespace nlstplan::geo

#include "nlstplan/geo/geometry.h"

#include <cmath>
#include <set>
#include <utility>

#include "nlstplan/error.h"
#include "nlstplan/geo/predicates.h"

namespace nlstplan::geo {

bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Line::Line(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) {
        throw Error(ErrorCode::InvalidGeometry, "line needs at least one segment");
    }
    for (const auto& s : segments_) {
        if (!is_finite(s.a) || !is_finite(s.b)) {
            throw Error(ErrorCode::InvalidGeometry, "non-finite line coordinate");
        }
        if (s.a == s.b) {
            throw Error(ErrorCode::InvalidGeometry, "zero-length line segment");
        }
        bbox_.extend(s.a);
        bbox_.extend(s.b);
    }
}

Line Line::from_vertices(const std::vector<Point>& vertices) {
    std::vector<Segment> segments;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        segments.push_back({vertices[i - 1], vertices[i]});
    }
    return Line(std::move(segments));
}

double Line::length() const { return geo::length(*this); }

namespace {

bool ring_self_intersects(const Ring& ring) {
    const std::size_t n = ring.size() - 1;  // closed: edges i -> i+1
    for (std::size_t i = 0; i < n; ++i) {
        Segment e{ring[i], ring[i + 1]};
        for (std::size_t j = i + 1; j < n; ++j) {
            // adjacent edges share a vertex by construction
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(e, {ring[j], ring[j + 1]})) return true;
        }
    }
    return false;
}

}  // namespace

Region::Region(std::vector<Ring> rings) : rings_(std::move(rings)) {
    if (rings_.empty()) {
        throw Error(ErrorCode::InvalidGeometry, "region needs an outer ring");
    }
    for (const auto& ring : rings_) {
        if (ring.size() < 4 || ring.front() != ring.back()) {
            throw Error(ErrorCode::InvalidGeometry, "region ring must be closed with >= 3 vertices");
        }
        std::set<std::pair<double, double>> distinct;
        for (const auto& p : ring) {
            if (!is_finite(p)) throw Error(ErrorCode::InvalidGeometry, "non-finite region coordinate");
            distinct.emplace(p.x, p.y);
        }
        if (distinct.size() < 3) {
            throw Error(ErrorCode::InvalidGeometry, "region ring has fewer than 3 distinct vertices");
        }
    }
    if (ring_self_intersects(rings_.front())) {
        throw Error(ErrorCode::InvalidGeometry, "outer ring self-intersects");
    }
    for (const auto& p : rings_.front()) bbox_.extend(p);
}

double Region::area() const { return geo::area(*this); }

Rect bbox(const Geometry& g) {
    return std::visit(
        [](const auto& v) -> Rect {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Point>) {
                return Rect::of(v);
            } else {
                return v.bbox();
            }
        },
        g);
}

Point anchor(const Geometry& g) {
    if (const auto* p = std::get_if<Point>(&g)) return *p;
    return bbox(g).center();
}

}  // namespace nlstplan::geo

#pragma once

// Brute-force reference implementations used only by tests. They deliberately take
// different routes from the library code (winding numbers instead of ray casting,
// per-millisecond sampling instead of event sweeps, linear scans instead of trees).

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/knearest.h"
#include "nlstplan/geo/rtree.h"
#include "nlstplan/geo/temporal.h"

namespace oracle {

using namespace nlstplan::geo;

inline bool point_on_segment(Point p, Point a, Point b) {
    double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cr) > 1e-12 * (1 + std::abs(b.x - a.x) + std::abs(b.y - a.y))) return false;
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

/// Winding number of ring around p (non-zero = inside).
inline int winding(const Ring& ring, Point p) {
    int wn = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        Point a = ring[i], b = ring[i + 1];
        double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (a.y <= p.y) {
            if (b.y > p.y && cr > 0) ++wn;
        } else if (b.y <= p.y && cr < 0) {
            --wn;
        }
    }
    return wn;
}

inline bool region_contains(const Region& r, Point p) {
    for (const auto& ring : r.rings())
        for (std::size_t i = 0; i + 1 < ring.size(); ++i)
            if (point_on_segment(p, ring[i], ring[i + 1])) return true;
    if (winding(r.outer(), p) == 0) return false;
    for (std::size_t h = 1; h < r.rings().size(); ++h)
        if (winding(r.rings()[h], p) != 0) return false;
    return true;
}

/// Star-shaped polygon around `c`: one vertex per angular sector keeps the ring simple.
inline Ring star_ring(std::mt19937_64& rng, Point c, double rmin, double rmax, int vertices) {
    std::uniform_real_distribution<double> jitter(0, 0.8);
    std::uniform_real_distribution<double> rad(rmin, rmax);
    std::vector<double> angles;
    for (int i = 0; i < vertices; ++i) angles.push_back(2 * M_PI * (i + jitter(rng)) / vertices);
    Ring ring;
    for (double a : angles) {
        double r = rad(rng);
        ring.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    ring.push_back(ring.front());
    return ring;
}

inline std::vector<TupleId> linear_scan(const std::vector<RTreeEntry>& entries, const Rect& w) {
    std::vector<TupleId> out;
    for (const auto& e : entries)
        if (e.rect.xmin <= w.xmax && w.xmin <= e.rect.xmax && e.rect.ymin <= w.ymax && w.ymin <= e.rect.ymax)
            out.push_back(e.id);
    std::sort(out.begin(), out.end());
    return out;
}

/// Direct interpolation, independent of the library's unit lookup.
inline std::optional<Point> position(const MovingPoint& m, std::int64_t t) {
    for (const auto& u : m.units()) {
        if (u.period.start().ms <= t && t < u.period.end().ms) {
            double f = double(t - u.period.start().ms) / double(u.period.end().ms - u.period.start().ms);
            return Point{u.p0.x + f * (u.p1.x - u.p0.x), u.p0.y + f * (u.p1.y - u.p0.y)};
        }
    }
    return std::nullopt;
}

/// Top-k set at integer instant t by sorting all defined candidates.
inline std::set<TupleId> topk_at(const std::vector<Candidate>& cands, const MovingPoint& q, std::int64_t t,
                                 int k) {
    std::set<TupleId> out;
    auto qp = position(q, t);
    if (!qp) return out;
    std::vector<std::pair<double, TupleId>> d;
    for (const auto& c : cands) {
        auto cp = position(c.trajectory, t);
        if (!cp) continue;
        d.emplace_back(std::hypot(cp->x - qp->x, cp->y - qp->y), c.id);
    }
    std::sort(d.begin(), d.end());
    for (std::size_t i = 0; i < d.size() && i < static_cast<std::size_t>(k); ++i) out.insert(d[i].second);
    return out;
}

struct OracleInterval {
    TupleId object;
    std::int64_t start;
    std::int64_t end;
};

/// Sample every millisecond of `p`, cut maximal runs of a constant top-k set, emit
/// one interval per member of each run.
inline std::vector<OracleInterval> dense_knn(const std::vector<Candidate>& cands, const MovingPoint& q,
                                             const Period& p, int k,
                                             std::vector<std::set<TupleId>>* per_instant = nullptr) {
    std::vector<OracleInterval> out;
    std::set<TupleId> cur;
    std::int64_t run_start = p.start().ms;
    auto flush = [&](std::int64_t end) {
        for (auto id : cur) out.push_back({id, run_start, end});
    };
    for (std::int64_t t = p.start().ms; t < p.end().ms; ++t) {
        auto s = topk_at(cands, q, t, k);
        if (per_instant) per_instant->push_back(s);
        if (s != cur) {
            flush(t);
            cur = std::move(s);
            run_start = t;
        }
    }
    flush(p.end().ms);
    std::sort(out.begin(), out.end(), [](const OracleInterval& a, const OracleInterval& b) {
        return std::tie(a.object, a.start) < std::tie(b.object, b.start);
    });
    return out;
}

/// Random trajectory with up to `max_units` units inside `horizon`, possibly with gaps.
inline MovingPoint random_trajectory(std::mt19937_64& rng, std::int64_t horizon, int max_units, double extent,
                                     bool gapless = false) {
    std::uniform_int_distribution<int> nunits(1, max_units);
    std::uniform_real_distribution<double> coord(0, extent);
    int n = gapless ? max_units : nunits(rng);
    std::uniform_int_distribution<std::int64_t> tdist(1, horizon - 1);
    std::set<std::int64_t> cs;
    while (static_cast<int>(cs.size()) < (gapless ? n - 1 : 2 * n)) cs.insert(tdist(rng));
    std::vector<UnitPoint> units;
    if (gapless) {
        std::vector<std::int64_t> b{0};
        b.insert(b.end(), cs.begin(), cs.end());
        b.push_back(horizon);
        Point prev{coord(rng), coord(rng)};
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            Point next{coord(rng), coord(rng)};
            units.push_back({Period(b[i], b[i + 1]), prev, next});
            prev = next;
        }
    } else {
        std::vector<std::int64_t> b(cs.begin(), cs.end());
        for (std::size_t i = 0; i + 1 < b.size(); i += 2) {
            units.push_back({Period(b[i], b[i + 1]), {coord(rng), coord(rng)}, {coord(rng), coord(rng)}});
        }
    }
    return MovingPoint(std::move(units));
}

}  // namespace oracle

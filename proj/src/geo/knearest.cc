#include "nlstplan/geo/knearest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nlstplan/error.h"
#include "nlstplan/geo/predicates.h"

namespace nlstplan::geo {

namespace {

constexpr double kSnap = 1e-9;

/// Linear relative motion over one slice: rel(tau) = offset + velocity * tau.
struct Motion {
    TupleId id;
    Point offset;
    Point velocity;

    double dist2(double tau) const {
        double x = offset.x + velocity.x * tau;
        double y = offset.y + velocity.y * tau;
        return x * x + y * y;
    }
};

Point velocity_of(const UnitPoint& u) {
    double span = static_cast<double>(u.period.duration_ms());
    return {(u.p1.x - u.p0.x) / span, (u.p1.y - u.p0.y) / span};
}

/// Cursor over the units of one trajectory for monotonically increasing slice starts.
class UnitCursor {
public:
    explicit UnitCursor(const MovingPoint* m) : m_(m) {}

    /// Unit covering [start, end) or nullptr; slices never straddle unit boundaries.
    const UnitPoint* covering(std::int64_t start) {
        const auto& units = m_->units();
        while (next_ < units.size() && units[next_].period.end().ms <= start) ++next_;
        if (next_ < units.size() && units[next_].period.start().ms <= start) return &units[next_];
        return nullptr;
    }

private:
    const MovingPoint* m_;
    std::size_t next_ = 0;
};

struct Elementary {
    std::int64_t start;
    std::int64_t end;
    std::vector<TupleId> members;  // sorted by id
};

}  // namespace

std::vector<double> quadratic_roots_in(double a, double b, double c, double lo, double hi) {
    std::vector<double> roots;
    auto keep = [&](double r) {
        if (std::isfinite(r) && r > lo + kSnap && r < hi - kSnap) roots.push_back(r);
    };
    const double scale = std::max({std::abs(a) * hi * hi, std::abs(b) * hi, std::abs(c), 1e-300});
    if (std::abs(a) * (hi * hi + 1) <= 1e-14 * scale) {
        if (std::abs(b) * (hi + 1) <= 1e-14 * scale) return roots;  // constant difference
        keep(-c / b);
    } else {
        double disc = b * b - 4 * a * c;
        if (disc < 0) return roots;
        double sq = std::sqrt(disc);
        // numerically stable pair
        double q = -0.5 * (b + (b >= 0 ? sq : -sq));
        if (q != 0) {
            keep(q / a);
            keep(c / q);
        } else {
            keep(0.0);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

std::vector<NearestInterval> knearest_sweep(std::span<const Candidate> candidates, const MovingPoint& q,
                                            const Period& period, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidK, "knearest requires k >= 1");

    const MovingPoint query = atperiods(q, period);
    if (query.empty()) return {};
    std::vector<MovingPoint> clipped;
    clipped.reserve(candidates.size());
    for (const auto& c : candidates) clipped.push_back(atperiods(c.trajectory, period));

    std::vector<std::int64_t> bounds;
    auto add_bounds = [&bounds](const MovingPoint& m) {
        for (const auto& u : m.units()) {
            bounds.push_back(u.period.start().ms);
            bounds.push_back(u.period.end().ms);
        }
    };
    add_bounds(query);
    for (const auto& m : clipped) add_bounds(m);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    UnitCursor qcur(&query);
    std::vector<UnitCursor> cursors;
    cursors.reserve(clipped.size());
    for (const auto& m : clipped) cursors.emplace_back(&m);

    const auto top = static_cast<std::size_t>(k);
    std::vector<Elementary> pieces;
    std::vector<Motion> active;
    std::vector<std::pair<double, TupleId>> ranked;

    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const std::int64_t b0 = bounds[s];
        const std::int64_t b1 = bounds[s + 1];
        const UnitPoint* qu = qcur.covering(b0);
        if (!qu) continue;
        const Point q0 = qu->at(static_cast<double>(b0));
        const Point qv = velocity_of(*qu);

        active.clear();
        for (std::size_t i = 0; i < clipped.size(); ++i) {
            const UnitPoint* cu = cursors[i].covering(b0);
            if (!cu) continue;
            const Point c0 = cu->at(static_cast<double>(b0));
            const Point cv = velocity_of(*cu);
            active.push_back({candidates[i].id, {c0.x - q0.x, c0.y - q0.y}, {cv.x - qv.x, cv.y - qv.y}});
        }
        if (active.empty()) continue;

        const double len = static_cast<double>(b1 - b0);
        std::vector<double> events{0.0, len};
        if (active.size() > top) {
            // order changes only where two squared distances cross
            for (std::size_t i = 0; i < active.size(); ++i) {
                const Motion& a = active[i];
                for (std::size_t j = i + 1; j < active.size(); ++j) {
                    const Motion& b = active[j];
                    double qa = (a.velocity.x * a.velocity.x + a.velocity.y * a.velocity.y) -
                                (b.velocity.x * b.velocity.x + b.velocity.y * b.velocity.y);
                    double qb = 2 * ((a.offset.x * a.velocity.x + a.offset.y * a.velocity.y) -
                                     (b.offset.x * b.velocity.x + b.offset.y * b.velocity.y));
                    double qc = (a.offset.x * a.offset.x + a.offset.y * a.offset.y) -
                                (b.offset.x * b.offset.x + b.offset.y * b.offset.y);
                    for (double r : quadratic_roots_in(qa, qb, qc, 0.0, len)) events.push_back(r);
                }
            }
            std::sort(events.begin(), events.end());
            events.erase(std::unique(events.begin(), events.end()), events.end());
        }

        for (std::size_t e = 0; e + 1 < events.size(); ++e) {
            const std::int64_t start = b0 + static_cast<std::int64_t>(std::ceil(events[e]));
            const std::int64_t end = b0 + static_cast<std::int64_t>(std::ceil(events[e + 1]));
            if (start >= end) continue;
            const double mid = (events[e] + events[e + 1]) / 2;
            ranked.clear();
            for (const auto& m : active) ranked.emplace_back(m.dist2(mid), m.id);
            const std::size_t n = std::min(top, ranked.size());
            std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
            std::vector<TupleId> members;
            members.reserve(n);
            for (std::size_t r = 0; r < n; ++r) members.push_back(ranked[r].second);
            std::sort(members.begin(), members.end());
            if (!pieces.empty() && pieces.back().end == start && pieces.back().members == members) {
                pieces.back().end = end;
            } else {
                pieces.push_back({start, end, std::move(members)});
            }
        }
    }

    // rank members at the midpoint of each merged piece
    std::map<TupleId, std::size_t> index_of;
    for (std::size_t i = 0; i < candidates.size(); ++i) index_of.emplace(candidates[i].id, i);

    std::vector<NearestInterval> out;
    for (const auto& piece : pieces) {
        const double mid = (static_cast<double>(piece.start) + static_cast<double>(piece.end)) / 2;
        const auto qp = mpoint_at(query, mid);
        ranked.clear();
        for (TupleId id : piece.members) {
            double d = std::numeric_limits<double>::infinity();
            auto cp = mpoint_at(clipped[index_of.at(id)], mid);
            if (qp && cp) d = distance(*qp, *cp);
            ranked.emplace_back(d, id);
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            out.push_back({ranked[r].second, Period(piece.start, piece.end), static_cast<int>(r + 1)});
        }
    }
    return out;
}

}  // namespace nlstplan::geo

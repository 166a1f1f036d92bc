#include "nlstplan/geo/temporal.h"

#include <algorithm>
#include <utility>

#include "nlstplan/error.h"

namespace nlstplan::geo {

Period::Period(Instant start, Instant end) : start_(start), end_(end) {
    if (start.ms < 0 || !(start < end)) {
        throw Error(ErrorCode::InvalidGeometry, "period requires 0 <= start < end");
    }
}

std::optional<Period> Period::intersection(const Period& o) const {
    Instant s = std::max(start_, o.start_);
    Instant e = std::min(end_, o.end_);
    if (!(s < e)) return std::nullopt;
    return Period(s, e);
}

Point UnitPoint::at(double t_ms) const {
    double span = static_cast<double>(period.duration_ms());
    double f = (t_ms - static_cast<double>(period.start().ms)) / span;
    return {p0.x + f * (p1.x - p0.x), p0.y + f * (p1.y - p0.y)};
}

MovingPoint::MovingPoint(std::vector<UnitPoint> units) : units_(std::move(units)) {
    for (std::size_t i = 0; i < units_.size(); ++i) {
        if (!is_finite(units_[i].p0) || !is_finite(units_[i].p1)) {
            throw Error(ErrorCode::InvalidGeometry, "non-finite unit coordinate");
        }
        if (i > 0 && units_[i - 1].period.end() > units_[i].period.start()) {
            throw Error(ErrorCode::InvalidGeometry, "moving point units must be sorted and disjoint");
        }
    }
}

MovingPoint MovingPoint::stationary(Point p, Period period) { return MovingPoint({UnitPoint{period, p, p}}); }

Rect MovingPoint::bbox() const {
    Rect r = Rect::empty();
    for (const auto& u : units_) {
        r.extend(u.p0);
        r.extend(u.p1);
    }
    return r;
}

namespace {

const UnitPoint* unit_at(const MovingPoint& m, double t) {
    const auto& units = m.units();
    // first unit whose end is beyond t
    auto it = std::upper_bound(units.begin(), units.end(), t, [](double value, const UnitPoint& u) {
        return value < static_cast<double>(u.period.end().ms);
    });
    if (it == units.end() || static_cast<double>(it->period.start().ms) > t) return nullptr;
    return &*it;
}

}  // namespace

std::optional<Point> mpoint_at(const MovingPoint& m, Instant t) { return mpoint_at(m, static_cast<double>(t.ms)); }

std::optional<Point> mpoint_at(const MovingPoint& m, double t_ms) {
    const UnitPoint* u = unit_at(m, t_ms);
    if (!u) return std::nullopt;
    return u->at(t_ms);
}

std::vector<Period> deftime(const MovingPoint& m) {
    std::vector<Period> out;
    for (const auto& u : m.units()) {
        if (!out.empty() && out.back().end() == u.period.start()) {
            out.back() = Period(out.back().start(), u.period.end());
        } else {
            out.push_back(u.period);
        }
    }
    return out;
}

MovingPoint atperiods(const MovingPoint& m, const Period& p) {
    std::vector<UnitPoint> units;
    for (const auto& u : m.units()) {
        auto clipped = u.period.intersection(p);
        if (!clipped) continue;
        if (*clipped == u.period) {
            units.push_back(u);
            continue;
        }
        units.push_back({*clipped, u.at(static_cast<double>(clipped->start().ms)),
                         u.at(static_cast<double>(clipped->end().ms))});
    }
    return MovingPoint(std::move(units));
}

MovingPoint atperiods(const MovingPoint& m, const std::vector<Period>& periods) {
    std::vector<UnitPoint> units;
    for (const auto& p : periods) {
        auto part = atperiods(m, p);
        units.insert(units.end(), part.units().begin(), part.units().end());
    }
    std::sort(units.begin(), units.end(),
              [](const UnitPoint& a, const UnitPoint& b) { return a.period.start() < b.period.start(); });
    return MovingPoint(std::move(units));
}

}  // namespace nlstplan::geo

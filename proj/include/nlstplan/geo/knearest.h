#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlstplan/geo/rtree.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::geo {

struct NearestInterval {
    TupleId object = 0;
    Period interval;
    /// 1-based rank evaluated at the interval midpoint.
    int rank = 1;

    friend bool operator==(const NearestInterval&, const NearestInterval&) = default;
};

struct Candidate {
    TupleId id = 0;
    MovingPoint trajectory;
};

/// Continuous k-nearest-neighbor sweep.
///
/// Reports, for every instant of `period` at which q and at least one candidate are
/// defined, which candidates are among the k closest to q. The timeline is cut at
/// every clipped unit boundary and at every real root of d_i^2(t) - d_j^2(t) for
/// concurrently defined candidates; within each elementary interval the order is
/// fixed and is evaluated at the midpoint. Real-valued event times map onto the
/// millisecond grid by ceiling: an integer instant t lies in the real interval [a, b)
/// exactly when ceil(a) <= t < ceil(b). Adjacent intervals with the same top-k set are
/// merged. Ties go to the smaller tuple id.
///
/// Output is sorted by (interval start, rank). Throws InvalidK when k < 1.
std::vector<NearestInterval> knearest_sweep(std::span<const Candidate> candidates, const MovingPoint& q,
                                            const Period& period, int k);

/// Roots of a*t^2 + b*t + c = 0 within the open interval (lo, hi), ascending.
/// Roots within 1e-9 of an endpoint are dropped (snapped onto the boundary).
std::vector<double> quadratic_roots_in(double a, double b, double c, double lo, double hi);

}  // namespace nlstplan::geo

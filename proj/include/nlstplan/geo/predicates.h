#pragma once

#include <variant>
#include <vector>

#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::geo {

/// Inside the outer ring and outside every hole. Boundary points count as inside.
bool contains(const Region& r, Point p);

/// Operand of `intersects`: a spatial value or a time interval.
using Intersectable = std::variant<Point, Line, Region, Period>;

/// True iff a and b share a point (or instant). Supported pairs: period x period,
/// region x region, line x region, point x region, in either order. Anything else
/// throws IncompatibleOperands.
bool intersects(const Intersectable& a, const Intersectable& b);

bool segments_intersect(const Segment& s, const Segment& t);
bool intersects(const Line& l, const Region& r);
bool intersects(const Region& a, const Region& b);

double distance(Point a, Point b);
double distance(Point p, const Segment& s);
/// Point-to-geometry distance; zero inside a region.
double distance(Point p, const Geometry& g);

double length(const Line& l);
double area(const Region& r);

}  // namespace nlstplan::geo

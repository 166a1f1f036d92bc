#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::geo {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// WKT subset: `POINT (x y)`, `LINESTRING (x y, ...)`, `POLYGON ((ring), (hole), ...)`.
std::string to_wkt(const Geometry& g);
/// `MPOINT ((t0 t1 x0 y0 x1 y1), ...)`, `MPOINT EMPTY` for no units.
std::string to_text(const MovingPoint& m);

using SpatialValue = std::variant<Geometry, MovingPoint>;

/// Parses one encoded value starting at `pos` and advances `pos` past it.
/// Throws BadEncoding (or InvalidGeometry for well-formed but invalid shapes).
SpatialValue parse_spatial_prefix(std::string_view text, std::size_t& pos);

Geometry parse_wkt(std::string_view text);
MovingPoint parse_mpoint(std::string_view text);

}  // namespace nlstplan::geo

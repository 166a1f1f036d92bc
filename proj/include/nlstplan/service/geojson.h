#pragma once

#include "json.hpp"
#include "nlstplan/geo/geometry.h"
#include "nlstplan/geo/temporal.h"
#include "nlstplan/planner/exec.h"

namespace nlstplan::service {

/// GeoJSON geometry object. Lines whose segments chain become a LineString, otherwise a
/// MultiLineString.
nlohmann::json geometry_json(const geo::Geometry& g);

/// LineString through the unit endpoints. Each vertex i has properties t0[i] (arrival) and
/// t1[i] (departure), which differ only across gaps in the definition time.
nlohmann::json trajectory_feature(const geo::MovingPoint& m, nlohmann::json properties);

/// One Feature per geometry attribute of each row, carrying the row's other attributes as
/// properties plus "row", "attribute" and "layer" = "result". kNN links follow as LineString
/// features with "layer" = "knn-link", "rank" and "distance".
nlohmann::json to_geojson(const planner::ResultSet& rs);

}  // namespace nlstplan::service

#include "nlstplan/service/geojson.h"

namespace nlstplan::service {

using catalog::AttrKind;
using nlohmann::json;

namespace {

json coords(geo::Point p) { return json::array({p.x, p.y}); }

json ring_json(const geo::Ring& r) {
    json out = json::array();
    for (const auto& p : r) out.push_back(coords(p));
    if (!r.empty() && r.front() != r.back()) out.push_back(coords(r.front()));
    return out;
}

json scalar(const catalog::Value& v) {
    switch (v.kind()) {
        case AttrKind::Int: return v.as_int();
        case AttrKind::Real: return v.as_real();
        case AttrKind::Text: return v.as_text();
        case AttrKind::Instant: return v.as_instant().ms;
        case AttrKind::Period: return json::array({v.as_period().start().ms, v.as_period().end().ms});
        default: return nullptr;
    }
}

bool is_geometry(AttrKind k) { return catalog::is_spatial(k) || k == AttrKind::MPoint; }

}  // namespace

json geometry_json(const geo::Geometry& g) {
    if (const auto* p = std::get_if<geo::Point>(&g)) return {{"type", "Point"}, {"coordinates", coords(*p)}};
    if (const auto* r = std::get_if<geo::Region>(&g)) {
        json rings = json::array();
        for (const auto& ring : r->rings()) rings.push_back(ring_json(ring));
        return {{"type", "Polygon"}, {"coordinates", rings}};
    }
    const auto& line = std::get<geo::Line>(g);
    json parts = json::array();
    json current = json::array();
    const geo::Point* last = nullptr;
    for (const auto& s : line.segments()) {
        if (!last || *last != s.a) {
            if (!current.empty()) parts.push_back(current);
            current = json::array({coords(s.a)});
        }
        current.push_back(coords(s.b));
        last = &s.b;
    }
    if (!current.empty()) parts.push_back(current);
    if (parts.size() == 1) return {{"type", "LineString"}, {"coordinates", parts[0]}};
    return {{"type", "MultiLineString"}, {"coordinates", parts}};
}

json trajectory_feature(const geo::MovingPoint& m, json properties) {
    json pts = json::array();
    json t0 = json::array();
    json t1 = json::array();
    for (std::size_t i = 0; i < m.units().size(); ++i) {
        const auto& u = m.units()[i];
        const bool joined = i > 0 && m.units()[i - 1].p1 == u.p0;
        if (joined) {
            t1.back() = u.period.start().ms;
        } else {
            pts.push_back(coords(u.p0));
            t0.push_back(u.period.start().ms);
            t1.push_back(u.period.start().ms);
        }
        pts.push_back(coords(u.p1));
        t0.push_back(u.period.end().ms);
        t1.push_back(u.period.end().ms);
    }
    properties["t0"] = t0;
    properties["t1"] = t1;
    return {{"type", "Feature"}, {"geometry", {{"type", "LineString"}, {"coordinates", pts}}}, {"properties", properties}};
}

json to_geojson(const planner::ResultSet& rs) {
    json features = json::array();
    for (std::size_t r = 0; r < rs.rows.size(); ++r) {
        const auto& row = rs.rows[r];
        json props = json::object();
        for (std::size_t a = 0; a < rs.schema.size(); ++a) {
            if (!is_geometry(rs.schema[a].kind)) props[rs.schema[a].name] = scalar(row[a]);
        }
        props["row"] = r;
        props["layer"] = "result";
        for (std::size_t a = 0; a < rs.schema.size(); ++a) {
            const auto kind = rs.schema[a].kind;
            if (!is_geometry(kind)) continue;
            json p = props;
            p["attribute"] = rs.schema[a].name;
            if (kind == AttrKind::MPoint) {
                if (!row[a].as_mpoint().empty()) features.push_back(trajectory_feature(row[a].as_mpoint(), std::move(p)));
            } else {
                features.push_back({{"type", "Feature"}, {"geometry", geometry_json(*row[a].geometry())}, {"properties", p}});
            }
        }
    }
    for (const auto& l : rs.knn_links) {
        json p = {{"layer", "knn-link"}, {"rank", l.rank}, {"distance", l.distance}, {"neighbor", l.neighbor_name}};
        if (l.interval) p["interval"] = json::array({l.interval->start().ms, l.interval->end().ms});
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", json::array({coords(l.query), coords(l.neighbor)})}}},
                            {"properties", p}});
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace nlstplan::service

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/error.h"
#include "nlstplan/geo/predicates.h"
#include "nlstplan/nlu/extract.h"
#include "nlstplan/planner/exec.h"
#include "nlstplan/planner/map.h"
#include "support/oracles.h"
#include "support/plangen.h"
#include "support/tempdir.h"

using namespace nlstplan;
using namespace nlstplan::planner;
using catalog::AttrKind;

namespace {

const catalog::Database& minicity() {
    static const catalog::Database db = catalog::load_dataset(testing_support::data_dir() / "minicity");
    return db;
}

const catalog::Database& london() {
    static const catalog::Database db = catalog::load_dataset(testing_support::data_dir() / "minicity-london");
    return db;
}

const char* const kQ2 = "Show me fifty nearest neighbors to the train 5 between 6am and 11am.";
const char* const kQ2Plan =
    "query UTOrdered feed filter [(deftime(.UTrip) intersects [21600000, 39600000))] knearest[UTrip, train5, 50] consume;";


std::string text_of(const ResultSet& rs, std::size_t row, const std::string& attr) {
    for (std::size_t i = 0; i < rs.schema.size(); ++i) {
        if (rs.schema[i].name == attr) return catalog::format_value(rs.rows[row][i]);
    }
    FAIL("no attribute " << attr);
    return {};
}

std::size_t column(const ResultSet& rs, const std::string& attr) {
    for (std::size_t i = 0; i < rs.schema.size(); ++i) {
        if (rs.schema[i].name == attr) return i;
    }
    FAIL("no attribute " << attr);
    return 0;
}

PhysicalPlan parse(const std::string& s) { return parse_plan(s); }

}  // namespace

TEST_CASE("rendering follows the plan grammar") {
    PhysicalPlan p{PhysicalOp::consume(PhysicalOp::filter(
        PhysicalOp::feed("districts"), Expr::call("contains", {Expr::attr("area"), Expr::literal(geo::Geometry{geo::Point{1, 2}})})))};
    CHECK(render_plan(p) == "query districts feed filter [(contains(.area, POINT (1 2)))] consume;");
    p.root.kind = OpKind::Count;
    CHECK(render_plan(p) == "query districts feed filter [(contains(.area, POINT (1 2)))] count;");
    CHECK(parse_plan(render_plan(p)) == p);
    CHECK(p.sources() == std::vector<std::string>{"districts"});
    CHECK_FALSE(p.uses_index());

    PhysicalPlan w{PhysicalOp::count(PhysicalOp::window("pois_pos_rtree", "pois", geo::Rect{0, 0, 10, 20.5}))};
    CHECK(render_plan(w) == "query pois_pos_rtree pois windowintersects[0 0 10 20.5] count;");
    CHECK(w.uses_index());
    CHECK(w.root.children[0].index_attr() == "pos");

    PhysicalPlan j{PhysicalOp::consume(PhysicalOp::spatialjoin(PhysicalOp::feed("universities"), PhysicalOp::feed("fastfood"),
                                                               "campus", "pos", "dist", 250))};
    CHECK(render_plan(j) == "query universities feed fastfood feed spatialjoin[campus, pos, dist<=250] consume;");
    CHECK(parse_plan(render_plan(j)) == j);
    CHECK(j.sources() == std::vector<std::string>{"universities", "fastfood"});
}

TEST_CASE("random plans survive a render/parse round trip") {
    testing_support::PlanGen gen(20240611);
    for (int i = 0; i < 500; ++i) {
        PhysicalPlan p = gen.plan();
        REQUIRE_NOTHROW(validate(p));
        const std::string text = render_plan(p);
        INFO(text);
        PhysicalPlan q = parse_plan(text);
        CHECK(q == p);
        CHECK(render_plan(q) == text);
    }
}

TEST_CASE("syntax errors point at the offending token") {
    try {
        parse("query districts fee filter [(TRUE)] consume;");
        FAIL("expected PlanSyntaxError");
    } catch (const PlanSyntaxError& e) {
        CHECK(e.token() == "fee");
        CHECK(e.position() == 16);
    }
    CHECK_THROWS_AS(parse("query districts feed consume"), PlanSyntaxError);
    CHECK_THROWS_AS(parse("query districts feed filter [(TRUE) consume;"), PlanSyntaxError);
    CHECK_THROWS_AS(parse("query feed consume;"), PlanSyntaxError);
    CHECK_THROWS_AS(parse("query a feed b feed consume;"), PlanSyntaxError);
    CHECK_THROWS_AS(parse("query a feed knearest[pos, x, 0] consume;"), PlanSyntaxError);
    CHECK_THROWS_AS(parse("query a feed filter [(deftime(.t) intersects [5, 5))] consume;"), PlanSyntaxError);
    CHECK_THROWS_AS(parse(""), PlanSyntaxError);
}

TEST_CASE("plan tree mirrors the operator nesting") {
    auto tree = plan_tree(parse(kQ2Plan));
    CHECK(tree["op"] == "consume");
    const auto& knn = tree["children"][0];
    CHECK(knn["op"] == "knearest");
    CHECK(knn["params"]["k"] == 50);
    CHECK(knn["params"]["object"] == "train5");
    CHECK(knn["children"][0]["op"] == "filter");
    CHECK(knn["children"][0]["children"][0]["op"] == "feed");
    CHECK(knn["children"][0]["children"][0]["params"]["relation"] == "UTOrdered");
    CHECK(knn["children"][0]["children"][0]["children"].empty());
}

TEST_CASE("the nearest-neighbor example maps to the canonical plan") {
    const auto& db = minicity();
    auto ex = nlu::extract(kQ2, db.kb());
    PhysicalPlan p = map_query(QueryType::NearestNeighbor, ex, db);
    CHECK(render_plan(p) == kQ2Plan);
    CHECK(parse(kQ2Plan) == p);

    SUBCASE("missing k defaults to one with a warning") {
        ex.k.reset();
        std::vector<std::string> warnings;
        auto q = map_query(QueryType::NearestNeighbor, ex, db, &warnings);
        CHECK(q.root.children[0].k == 1);
        CHECK(warnings.size() == 1);
    }
    SUBCASE("missing object") {
        nlu::ExtractionResult none;
        none.k = 3;
        try {
            map_query(QueryType::NearestNeighbor, none, db);
            FAIL("expected MissingSlot");
        } catch (const MissingSlotError& e) {
            CHECK(e.slot() == "object");
        }
    }
}

TEST_CASE("knearest results stay inside the query period and match a brute-force ranking") {
    const auto& db = minicity();
    auto plan = parse("query UTOrdered feed filter [(deftime(.UTrip) intersects [21600000, 25200000))] "
                      "knearest[UTrip, train5, 5] consume;");
    auto run = execute(plan, db);
    const auto& rs = run.result;
    REQUIRE_FALSE(rs.rows.empty());
    const geo::Period P(21600000, 25200000);
    const auto ic = column(rs, "interval");
    const auto rc = column(rs, "rank");
    for (const auto& row : rs.rows) {
        auto iv = row[ic].as_period();
        CHECK(P.start() <= iv.start());
        CHECK(iv.end() <= P.end());
        CHECK(row[rc].as_int() >= 1);
        CHECK(row[rc].as_int() <= 5);
    }
    CHECK(rs.knn_links.size() == rs.rows.size());
    for (std::size_t i = 0; i < rs.rows.size(); ++i) CHECK(text_of(rs, i, "name") != "train5");

    // at sampled instants the reported neighbors are exactly the five closest defined vehicles
    const auto& vehicles = db.relation("vehicles");
    const auto& q = vehicles.tuple(*vehicles.find_by_name("train5"))[vehicles.attr("trip")].as_mpoint();
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int s = 0; s < 60; ++s) {
        const std::int64_t t = 21600000 + static_cast<std::int64_t>(rng() % 3600000);
        auto qp = geo::mpoint_at(q, geo::Instant{t});
        if (!qp) continue;
        std::vector<std::pair<double, std::string>> ds;
        for (const auto& tup : vehicles.tuples()) {
            if (tup[vehicles.attr("name")].as_text() == "train5") continue;
            if (auto p = geo::mpoint_at(tup[vehicles.attr("trip")].as_mpoint(), geo::Instant{t})) {
                ds.emplace_back(geo::distance(*qp, *p), tup[vehicles.attr("name")].as_text());
            }
        }
        std::sort(ds.begin(), ds.end());
        if (ds.size() > 5 && ds[5].first - ds[4].first < 1e-6) continue;  // tie at the cut
        std::set<std::string> expect;
        for (std::size_t i = 0; i < ds.size() && i < 5; ++i) expect.insert(ds[i].second);
        std::set<std::string> got;
        for (std::size_t i = 0; i < rs.rows.size(); ++i) {
            if (rs.rows[i][ic].as_period().contains(geo::Instant{t})) got.insert(text_of(rs, i, "name"));
        }
        CHECK(got == expect);
        ++checked;
    }
    CHECK(checked > 30);
}

TEST_CASE("execution is deterministic") {
    const auto& db = minicity();
    auto plan = parse(kQ2Plan);
    auto a = execute(plan, db);
    auto b = execute(plan, db);
    CHECK(a.result == b.result);
    CHECK(a.elapsed_ms >= 0);
    CHECK(a.result.rows.size() > 0);
}

TEST_CASE("count matches the relation statistics and a false filter yields nothing") {
    for (const auto* db : {&minicity(), &london()}) {
        for (const auto& r : db->relations()) {
            auto rs = execute(parse("query " + r.name() + " feed count;"), *db).result;
            REQUIRE(rs.rows.size() == 1);
            CHECK(rs.schema[0].name == "count");
            CHECK(static_cast<std::size_t>(rs.rows[0][0].as_int()) == catalog::relation_stats(*db, r.name()).tuple_count);
            auto none = execute(parse("query " + r.name() + " feed filter [(FALSE)] consume;"), *db).result;
            CHECK(none.rows.empty());
            CHECK(none.schema == r.attributes());
            auto all = execute(parse("query " + r.name() + " feed filter [(TRUE)] consume;"), *db).result;
            CHECK(all.rows == r.tuples());
        }
    }
}

TEST_CASE("indexed windows with residual filters equal their unindexed twins") {
    const auto& db = minicity();
    testing_support::IndexedPairGen gen(99);
    int nonempty = 0;
    for (int i = 0; i < 200; ++i) {
        auto [base, indexed] = gen.next();
        auto a = execute(base, db).result;
        auto b = execute(indexed, db).result;
        INFO(render_plan(indexed));
        CHECK(a == b);
        if (!a.rows.empty()) ++nonempty;
    }
    CHECK(nonempty > 60);
}

TEST_CASE("the join example agrees with a nested-loop oracle") {
    const auto& db = london();
    auto ex = nlu::extract("What is the fastfood at each university in London?", db.kb());
    PhysicalPlan p = map_query(QueryType::Join, ex, db);
    const auto& join = p.root.children.at(0);
    REQUIRE(join.kind == OpKind::SpatialJoin);
    CHECK(join.fn == "contains");
    CHECK(join.children[0].relation == "universities");
    auto rs = execute(p, db).result;

    const auto& uni = db.relation("universities");
    const auto& ff = db.relation("fastfood");
    const auto& loc = db.kb().locations()[ex.locations.front()];
    std::set<std::pair<std::string, std::string>> expect;
    for (const auto& u : uni.tuples()) {
        for (const auto& f : ff.tuples()) {
            auto pt = f[ff.attr("pos")].as_point();
            bool in_loc = oracle::region_contains(std::get<geo::Region>(loc.geometry), pt);
            if (in_loc && oracle::region_contains(u[uni.attr("campus")].as_region(), pt)) {
                expect.emplace(u[uni.attr("name")].as_text(), f[ff.attr("name")].as_text());
            }
        }
    }
    std::set<std::pair<std::string, std::string>> got;
    for (std::size_t i = 0; i < rs.rows.size(); ++i) got.emplace(text_of(rs, i, "name"), text_of(rs, i, "name_2"));
    CHECK(got == expect);
    CHECK_FALSE(expect.empty());
    CHECK(rs.rows.size() == expect.size());
}

TEST_CASE("distance joins and static nearest neighbors agree with brute force") {
    const auto& db = minicity();
    const auto& pois = db.relation("pois");
    const auto& uni = db.relation("universities");

    auto rs = execute(parse("query pois feed universities feed spatialjoin[pos, campus, dist<=300] consume;"), db).result;
    std::size_t expect = 0;
    for (const auto& p : pois.tuples()) {
        for (const auto& u : uni.tuples()) {
            if (geo::distance(p[pois.attr("pos")].as_point(), geo::Geometry{u[uni.attr("campus")].as_region()}) <= 300) ++expect;
        }
    }
    CHECK(rs.rows.size() == expect);
    CHECK(expect > 0);

    const geo::Point c{5000, 5000};
    auto knn = execute(parse("query pois feed knearest[pos, POINT (5000 5000), 7] consume;"), db).result;
    REQUIRE(knn.rows.size() == 7);
    std::vector<double> ds;
    for (const auto& p : pois.tuples()) ds.push_back(geo::distance(c, p[pois.attr("pos")].as_point()));
    std::sort(ds.begin(), ds.end());
    const auto dc = column(knn, "distance");
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(knn.rows[i][column(knn, "rank")].as_int() == static_cast<std::int64_t>(i + 1));
        CHECK(knn.rows[i][dc].as_real() == doctest::Approx(ds[i]));
        CHECK_FALSE(knn.knn_links[i].interval.has_value());
    }

    // a named poi excludes itself
    const std::string self = pois.tuples().front()[pois.attr("name")].as_text();
    auto named = execute(PhysicalPlan{PhysicalOp::consume(
                             PhysicalOp::knearest(PhysicalOp::feed("pois"), "pos", ObjRef{self, std::nullopt}, 3))},
                         db)
                     .result;
    REQUIRE(named.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(text_of(named, i, "name") != self);
}

TEST_CASE("similarity ranks by mean synchronized distance") {
    const auto& db = minicity();
    auto rs = execute(parse("query vehicles feed similarity[trip, train5, 4] consume;"), db).result;
    REQUIRE(rs.rows.size() == 4);
    const auto& v = db.relation("vehicles");
    const auto& q = v.tuple(*v.find_by_name("train5"))[v.attr("trip")].as_mpoint();
    // oracle: per-second sampling over the common lifetime
    auto mean = [&](const geo::MovingPoint& m) {
        double sum = 0;
        std::size_t n = 0;
        auto span = geo::deftime(q);
        for (const auto& per : span) {
            for (std::int64_t t = per.start().ms; t < per.end().ms; t += 1000) {
                auto a = geo::mpoint_at(q, geo::Instant{t});
                auto b = geo::mpoint_at(m, geo::Instant{t});
                if (a && b) {
                    sum += geo::distance(*a, *b);
                    ++n;
                }
            }
        }
        return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::infinity();
    };
    std::vector<std::pair<double, std::string>> all;
    for (const auto& t : v.tuples()) {
        if (t[v.attr("name")].as_text() == "train5") continue;
        double d = mean(t[v.attr("trip")].as_mpoint());
        if (std::isfinite(d)) all.emplace_back(d, t[v.attr("name")].as_text());
    }
    std::sort(all.begin(), all.end());
    const auto dc = column(rs, "distance");
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(text_of(rs, i, "name") == all[i].second);
        CHECK(rs.rows[i][dc].as_real() == doctest::Approx(all[i].first).epsilon(1e-3));
    }
}

TEST_CASE("aggregates") {
    const auto& db = minicity();
    const auto& roads = db.relation("roads");
    double total = 0, longest = 0;
    for (const auto& t : roads.tuples()) {
        double l = geo::length(t[roads.attr("route")].as_line());
        total += l;
        longest = std::max(longest, l);
    }
    auto avg = execute(parse("query roads feed aggregate[avg, route];"), db).result;
    REQUIRE(avg.rows.size() == 1);
    CHECK(avg.schema[0].name == "avg_route");
    CHECK(avg.rows[0][0].as_real() == doctest::Approx(total / static_cast<double>(roads.size())));
    auto mx = execute(parse("query roads feed aggregate[max, route];"), db).result;
    CHECK(mx.rows[0][0].as_real() == doctest::Approx(longest));
    auto empty = execute(parse("query roads feed filter [(FALSE)] aggregate[min, route];"), db).result;
    CHECK(empty.rows.empty());
    auto cnt = execute(parse("query roads feed filter [(FALSE)] aggregate[count, route];"), db).result;
    CHECK(cnt.rows.at(0)[0].as_int() == 0);
}

TEST_CASE("execution errors name the failing operator") {
    const auto& db = minicity();
    auto expect_exec = [&](const std::string& text, const std::string& fragment) {
        try {
            execute(parse(text), db);
            FAIL("expected ExecError for " << text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ExecError);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_exec("query pois feed filter [(.nope = 1)] consume;", "nope");
    expect_exec("query nowhere feed consume;", "feed");
    expect_exec("query pois feed filter [(frob(.pos))] consume;", "frob");
    expect_exec("query pois feed filter [(deftime(.pos) intersects [0, 5))] consume;", "deftime");
    expect_exec("query pois feed knearest[name, train5, 3] consume;", "knearest");
    expect_exec("query roads_route_rtree roads windowintersects[0 0 1 1] consume;", "index");
}

TEST_CASE("every generated corpus entry maps to an executable plan of its type") {
    for (const auto* db : {&minicity(), &london()}) {
        auto entries = corpus::generate(*db, 140, 31);
        for (const auto& e : entries) {
            INFO(e.nlq);
            auto ex = nlu::from_slots(e.slots, db->kb());
            PhysicalPlan p;
            REQUIRE_NOTHROW(p = map_query(e.type, ex, *db));
            CHECK(parse_plan(render_plan(p)) == p);
            CHECK_NOTHROW(execute(p, *db));
        }
    }
}

TEST_CASE("mapping rules per query type") {
    const auto& db = minicity();
    auto plan_for = [&](QueryType t, const std::string& nlq) { return render_plan(map_query(t, nlu::extract(nlq, db.kb()), db)); };
    CHECK(plan_for(QueryType::TimeInterval, "Which vehicles were moving between 6am and 7am?") ==
          "query vehicles feed filter [(deftime(.trip) intersects [21600000, 25200000))] consume;");
    CHECK(plan_for(QueryType::Similarity, "Find the three trajectories most similar to train 5.") ==
          "query vehicles feed similarity[trip, train5, 3] consume;");
    CHECK(plan_for(QueryType::Aggregation, "What is the average length of roads?") == "query roads feed aggregate[avg, route];");
    CHECK(plan_for(QueryType::Aggregation, "What is the total number of rivers?") == "query rivers feed count;");
    const std::string range = plan_for(QueryType::Range, "Show pois within 500 m of Northgate.");
    INFO(range);
    CHECK(range.starts_with("query pois feed filter [(distance(.pos, POLYGON (("));
    CHECK(range.ends_with(" <= 500)] consume;"));
    const std::string nn = plan_for(QueryType::NearestNeighbor, "Find the 3 nearest pois to Sunny Fox Florist.");
    CHECK(nn == "query pois feed knearest[pos, \"Sunny Fox Florist\", 3] consume;");

    nlu::ExtractionResult moving_only;
    moving_only.relations = {"vehicles"};
    moving_only.locations = {0};
    CHECK_THROWS_WITH_AS(map_query(QueryType::BasicSpatial, moving_only, db), doctest::Contains("spatial"), Error);
    nlu::ExtractionResult no_agg;
    no_agg.relations = {"roads"};
    try {
        map_query(QueryType::Aggregation, no_agg, db);
        FAIL("expected UnsupportedType");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedType);
    }
    nlu::ExtractionResult no_period;
    no_period.relations = {"vehicles"};
    try {
        map_query(QueryType::TimeInterval, no_period, db);
        FAIL("expected MissingSlot");
    } catch (const MissingSlotError& e) {
        CHECK(e.slot() == "period");
    }
}

TEST_CASE("rows_json lists schema and cell text") {
    auto rs = execute(parse("query districts feed project[name] consume;"), minicity()).result;
    auto j = rows_json(rs);
    CHECK(j["schema"].size() == 1);
    CHECK(j["schema"][0]["name"] == "name");
    CHECK(j["schema"][0]["kind"] == "text");
    CHECK(j["rows"].size() == minicity().relation("districts").size());
    CHECK(j["rows"][0][0] == "Northgate");
}

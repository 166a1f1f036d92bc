#include <fstream>
#include <functional>

#include "doctest.h"
#include "nlstplan/catalog/database.h"
#include "nlstplan/error.h"
#include "support/tempdir.h"

using namespace nlstplan;
using namespace nlstplan::catalog;
using testing_support::TempDir;

namespace {

const Database& minicity() {
    static const Database db = load_dataset(testing_support::data_dir() / "minicity");
    return db;
}

const Database& london() {
    static const Database db = load_dataset(testing_support::data_dir() / "minicity-london");
    return db;
}

std::size_t file_rows(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++n;
    }
    return n - 1;  // header
}

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

const char* kFixtureCatalog = R"({"name": "fx", "epoch": "day0", "relations": [
  {"name": "spots", "file": "spots.tsv", "attributes": [
    {"name": "name", "kind": "text", "indexed": false},
    {"name": "rating", "kind": "real", "indexed": false},
    {"name": "visits", "kind": "int", "indexed": false},
    {"name": "pos", "kind": "point", "indexed": true}]}]})";

}  // namespace

TEST_CASE("bundled minicity loads with six relations and indexes on region/point attributes") {
    const Database& db = minicity();
    CHECK(db.name() == "minicity");
    CHECK(db.declared_count() == 6);
    for (const char* r : {"districts", "pois", "roads", "vehicles", "rivers", "universities"}) {
        INFO(r);
        const Relation& rel = db.relation(r);
        CHECK(rel.size() == file_rows(testing_support::data_dir() / "minicity" / (std::string(r) + ".tsv")));
        for (const auto& a : rel.attributes()) {
            bool wants_index = a.kind == AttrKind::Point || a.kind == AttrKind::Region;
            CHECK((rel.index(a.name) != nullptr) == wants_index);
        }
    }
    CHECK(db.relation("pois").size() == 10000);
}

TEST_CASE("unit-ordered companion and alias") {
    const Database& db = minicity();
    const Relation& ut = db.relation("UTOrdered");
    CHECK(ut.name() == "vehicles_UTOrdered");
    CHECK(db.is_companion("vehicles_UTOrdered"));
    CHECK(ut.find_attr("UTrip").has_value());
    CHECK(ut.size() == db.relation("vehicles").size());
    std::int64_t prev = -1;
    for (const auto& t : ut.tuples()) {
        auto start = t[*ut.find_attr("UTrip")].as_mpoint().units().front().period.start().ms;
        CHECK(prev <= start);
        prev = start;
    }
}

TEST_CASE("load errors") {
    TempDir empty;
    CHECK(code_of([&] { load_dataset(empty.path()); }) == ErrorCode::MissingCatalog);

    TempDir arity;
    arity.write("catalog.json", kFixtureCatalog);
    arity.write("spots.tsv", "name\trating\tvisits\tpos\nA\t1.5\t3\tPOINT (1 2)\nB\t2\t4\n");
    std::string msg;
    CHECK(code_of([&] { load_dataset(arity.path()); }, &msg) == ErrorCode::SchemaMismatch);
    CHECK(msg.find("row 3") != std::string::npos);

    TempDir bad;
    bad.write("catalog.json", kFixtureCatalog);
    bad.write("spots.tsv", "name\trating\tvisits\tpos\nA\t1.5\t3\tPOINT (1 2)\nB\t2\t4\tPOINT (x y)\n");
    CHECK(code_of([&] { load_dataset(bad.path()); }, &msg) == ErrorCode::BadGeometry);
    CHECK(msg.find("row 3") != std::string::npos);

    TempDir kind;
    kind.write("catalog.json", kFixtureCatalog);
    kind.write("spots.tsv", "name\trating\tvisits\tpos\nA\t1.5\tlots\tPOINT (1 2)\n");
    CHECK(code_of([&] { load_dataset(kind.path()); }) == ErrorCode::SchemaMismatch);

    TempDir missing_file;
    missing_file.write("catalog.json", kFixtureCatalog);
    CHECK(code_of([&] { load_dataset(missing_file.path()); }) == ErrorCode::MissingCatalog);
}

TEST_CASE("numeric attributes, degenerate extent and duplicate names") {
    TempDir dir;
    dir.write("catalog.json", kFixtureCatalog);
    dir.write("spots.tsv", "name\trating\tvisits\tpos\nTwin\t1.5\t3\tPOINT (3 4)\nTwin\t-2\t0\tPOINT (3 4)\n");
    Database db = load_dataset(dir.path());
    const Relation& r = db.relation("spots");
    CHECK(r.tuple(0)[1].as_real() == 1.5);
    CHECK(r.tuple(1)[2].as_int() == 0);
    RelationStats s = relation_stats(db, "spots");
    CHECK(s.tuple_count == 2);
    REQUIRE(s.extents.size() == 1);
    CHECK(*s.extents[0].rect == geo::Rect{3, 4, 3, 4});

    REQUIRE(db.kb().locations().size() == 2);
    CHECK(db.kb().locations()[0].id != db.kb().locations()[1].id);
    auto m = db.kb().lookup("twin");
    REQUIRE(m.size() == 2);
    CHECK(m[0].score == 1.0);
    CHECK(m[1].score == 1.0);
    CHECK(m[0].index < m[1].index);
}

TEST_CASE("relation without a text attribute gives only a relation entry") {
    Relation r("marks", {{"pos", AttrKind::Point, false}});
    r.add({Value(geo::Point{1, 1})});
    Database db("x", {r});
    CHECK(db.kb().relations().size() == 1);
    CHECK(db.kb().locations().empty());
}

TEST_CASE("knowledge base grounding") {
    const KnowledgeBase& kb = london().kb();
    auto m = kb.lookup("city of london");
    REQUIRE_FALSE(m.empty());
    CHECK(m[0].kind == MatchKind::Location);
    CHECK(m[0].score == 1.0);
    const LocationKBEntry& e = kb.locations()[m[0].index];
    CHECK(e.name == "City of London");
    CHECK(e.kind == AttrKind::Region);
    CHECK(e.relation == "districts");

    CHECK(kb.lookup("zzzzqq").empty());
    auto u = kb.lookup("universitis");
    REQUIRE_FALSE(u.empty());
    CHECK(u[0].kind == MatchKind::Relation);
    CHECK(kb.relations()[u[0].index].relation == "universities");
    CHECK(u[0].score >= 0.8);
    CHECK(u[0].score == doctest::Approx(1.0 - 1.0 / 12));

    auto exact = kb.lookup_exact("University");
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].kind == MatchKind::Relation);
    CHECK(kb.lookup_exact("universitis").empty());

    auto suggestions = kb.suggest("atlantis", 3);
    CHECK(suggestions.size() == 3);
}

TEST_CASE("aliases cover the singular and a trailing s") {
    CHECK(relation_aliases("districts") == std::vector<std::string>{"districts", "district"});
    CHECK(relation_aliases("universities") ==
          std::vector<std::string>{"universities", "university", "universitie"});
    CHECK(relation_aliases("buses") == std::vector<std::string>{"buses", "bus", "buse"});
    CHECK(relation_aliases("fastfood") == std::vector<std::string>{"fastfood", "fastfoods"});
}

TEST_CASE("every location entry dereferences and every stored name looks itself up first") {
    for (const Database* db : {&minicity(), &london()}) {
        const KnowledgeBase& kb = db->kb();
        for (const auto& loc : kb.locations()) {
            const Relation& r = db->relation(loc.relation);
            REQUIRE(loc.tuple < r.size());
            REQUIRE(r.tuple(loc.tuple)[*r.name_attr()].as_text() == loc.name);
        }
        for (const auto& loc : kb.locations()) {
            auto m = kb.lookup(loc.name);
            REQUIRE_FALSE(m.empty());
            REQUIRE(m[0].score == 1.0);
            bool found = false;
            for (const auto& x : m) found = found || (x.kind == MatchKind::Location && x.index == loc.id);
            REQUIRE(found);
        }
        for (const auto& rel : kb.relations()) {
            auto m = kb.lookup(rel.relation);
            REQUIRE(m[0].kind == MatchKind::Relation);
            REQUIRE(kb.relations()[m[0].index].relation == rel.relation);
        }
    }
}

TEST_CASE("relation_stats") {
    const Database& db = minicity();
    auto s = relation_stats(db, "districts");
    CHECK(s.tuple_count == file_rows(testing_support::data_dir() / "minicity" / "districts.tsv"));
    CHECK(code_of([&] { relation_stats(db, "nowhere"); }) == ErrorCode::UnknownRelation);
    auto v = relation_stats(db, "vehicles");
    REQUIRE(v.extents.size() == 1);
    CHECK(v.extents[0].period.has_value());
    CHECK(v.extents[0].rect.has_value());
}

TEST_CASE("loading is deterministic") {
    auto a = serialize(load_dataset(testing_support::data_dir() / "minicity-london"));
    auto b = serialize(load_dataset(testing_support::data_dir() / "minicity-london"));
    CHECK(a == b);
}

TEST_CASE("sampling keeps at least 50 tuples or the whole relation") {
    Database s = minicity().sample(0.1, 7);
    CHECK(s.relation("pois").size() == 1000);
    CHECK(s.relation("districts").size() == minicity().relation("districts").size());
    CHECK(s.relation("pois").index("pos") != nullptr);
    Database again = minicity().sample(0.1, 7);
    CHECK(serialize(s) == serialize(again));
}

TEST_CASE("value text round trip") {
    for (auto [kind, text] : std::vector<std::pair<AttrKind, std::string>>{
             {AttrKind::Int, "-42"},
             {AttrKind::Real, "2.5"},
             {AttrKind::Text, "Old Town"},
             {AttrKind::Point, "POINT (1 2)"},
             {AttrKind::Line, "LINESTRING (0 0, 1 1)"},
             {AttrKind::Region, "POLYGON ((0 0, 1 0, 1 1, 0 0))"},
             {AttrKind::MPoint, "MPOINT ((0 10 0 0 1 1))"},
             {AttrKind::Instant, "500"},
             {AttrKind::Period, "[0, 10)"}}) {
        Value v = parse_value(kind, text);
        CHECK(v.kind() == kind);
        CHECK(format_value(v) == text);
        CHECK(parse_value(kind, format_value(v)) == v);
    }
    CHECK_THROWS_AS(parse_value(AttrKind::Point, "LINESTRING (0 0, 1 1)"), Error);
}

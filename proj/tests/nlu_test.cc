#include <random>
#include <regex>

#include "doctest.h"
#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/error.h"
#include "nlstplan/nlu/classifier.h"
#include "nlstplan/nlu/extract.h"
#include "support/tempdir.h"

using namespace nlstplan;
using namespace nlstplan::nlu;
using catalog::MatchKind;
using testing_support::TempDir;

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

std::vector<std::pair<Label, std::string>> labelled(const std::vector<TaggedSpan>& spans) {
    std::vector<std::pair<Label, std::string>> out;
    for (const auto& s : spans) out.emplace_back(s.label, s.text);
    return out;
}

void check_spans(std::string_view text, const CoarseTags& tags) {
    std::vector<TaggedSpan> all = tags.numbers;
    all.insert(all.end(), tags.info.begin(), tags.info.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i].begin < all[i].end);
        CHECK(all[i].end <= text.size());
        CHECK(text.substr(all[i].begin, all[i].end - all[i].begin) == all[i].text);
        if (i > 0) CHECK(all[i - 1].end <= all[i].begin);
    }
    for (const auto& s : tags.numbers) CHECK(s.label != Label::INFO);
    for (const auto& s : tags.info) CHECK(s.label == Label::INFO);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("tokenizer keeps decimals and clock times whole") {
    auto toks = tokenize("Within 0.5 km, 6:30am. End.");
    std::vector<std::string> texts;
    for (const auto& t : toks) texts.push_back(t.text);
    CHECK(texts == std::vector<std::string>{"within", "0.5", "km", "6:30am", "end"});
    CHECK(toks[3].begin == 15);
    CHECK(toks[3].end == 21);
}

TEST_CASE("clock tokens") {
    CHECK(parse_time_token("6am") == 6 * 3600000);
    CHECK(parse_time_token("12am") == 0);
    CHECK(parse_time_token("12pm") == 12 * 3600000);
    CHECK(parse_time_token("11:30pm") == (23 * 60 + 30) * 60000);
    CHECK(parse_time_token("06:00") == 6 * 3600000);
    CHECK(parse_time_token("24:00") == 24 * 3600000);
    CHECK_FALSE(parse_time_token("13pm"));
    CHECK_FALSE(parse_time_token("6"));
    CHECK_FALSE(parse_time_token("6:7"));
    CHECK_FALSE(parse_time_token("25:00"));
}

TEST_CASE("coarse tags of the nearest-neighbor example") {
    auto tags = coarse_tag(kQ2);
    using P = std::pair<Label, std::string>;
    CHECK(labelled(tags.numbers) == std::vector<P>{{Label::CARDINAL, "fifty"},
                                                   {Label::NUMBER, "5"},
                                                   {Label::TIME, "6am"},
                                                   {Label::TIME, "11am"}});
    CHECK(tags.numbers[0].value == 50);
    CHECK(labelled(tags.info) == std::vector<P>{{Label::INFO, "nearest neighbors"}, {Label::INFO, "train"}});
    check_spans(kQ2, tags);
}

TEST_CASE("quantity, cardinal and number recognizers") {
    auto tags = coarse_tag("pois within 500 m of the river");
    REQUIRE(tags.numbers.size() == 1);
    CHECK(tags.numbers[0].label == Label::QUANTITY);
    CHECK(tags.numbers[0].text == "500 m");
    CHECK(tags.numbers[0].value == 500);
    CHECK(tags.numbers[0].unit == "m");
    CHECK(labelled(tags.info) ==
          std::vector<std::pair<Label, std::string>>{{Label::INFO, "pois"}, {Label::INFO, "river"}});

    auto km = coarse_tag("roads within 1.5km of Harbor");
    REQUIRE(km.numbers.size() == 1);
    CHECK(km.numbers[0].label == Label::QUANTITY);
    CHECK(km.numbers[0].unit == "km");
    CHECK(km.numbers[0].value == 1.5);

    auto card = coarse_tag("the 3 nearest pois, twenty five closest, top 7, taxi 9");
    std::vector<std::pair<Label, double>> got;
    for (const auto& s : card.numbers) got.emplace_back(s.label, s.value);
    CHECK(got == std::vector<std::pair<Label, double>>{
                     {Label::CARDINAL, 3}, {Label::CARDINAL, 25}, {Label::CARDINAL, 7}, {Label::NUMBER, 9}});

    auto between = coarse_tag("vehicles moving between 7 and 9");
    REQUIRE(between.numbers.size() == 2);
    CHECK(between.numbers[0].label == Label::TIME);
    CHECK(between.numbers[1].value == 9 * 3600000.0);

    CHECK(code_of([] { coarse_tag(""); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { coarse_tag(" ?! "); }) == ErrorCode::EmptyInput);
}

TEST_CASE("coarse spans never overlap and stay inside the input") {
    for (const auto& e : corpus::generate(london(), 300, 11)) check_spans(e.nlq, coarse_tag(e.nlq));
    std::mt19937_64 rng(5);
    const std::string alphabet = "ab 0123456789:.,kmampt";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        std::size_t len = 1 + rng() % 40;
        for (std::size_t j = 0; j < len; ++j) s += alphabet[rng() % alphabet.size()];
        try {
            check_spans(s, coarse_tag(s));
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyInput);
        }
    }
}

TEST_CASE("fine extraction of the nearest-neighbor example") {
    const auto& kb = minicity().kb();
    auto r = extract(kQ2, kb);
    REQUIRE(r.objects.size() == 1);
    CHECK(kb.objects()[r.objects[0]].name == "train5");
    CHECK(kb.objects()[r.objects[0]].relation == "vehicles");
    CHECK(r.k == 50);
    CHECK(r.nn);
    REQUIRE(r.period);
    CHECK(r.period->start().ms == 21600000);
    CHECK(r.period->end().ms == 39600000);
    CHECK(r.relations.empty());
    CHECK(r.locations.empty());
    CHECK_FALSE(r.distance);
}

TEST_CASE("a district phrase grounds to the region value, not the relation") {
    const auto& kb = london().kb();
    auto r = extract("City of London District", kb);
    REQUIRE(r.locations.size() == 1);
    const auto& loc = kb.locations()[r.locations[0]];
    CHECK(loc.name == "City of London");
    CHECK(loc.relation == "districts");
    CHECK(loc.kind == catalog::AttrKind::Region);
    CHECK(r.relations.empty());
    REQUIRE(r.groundings.size() == 1);
    CHECK(r.groundings[0].kind == MatchKind::Location);
    CHECK(r.groundings[0].span == "City of London District");
}

TEST_CASE("the join example extracts both relations in order") {
    const auto& kb = london().kb();
    auto r = extract("What is the fastfood at each university in London?", kb);
    CHECK(r.relations == std::vector<std::string>{"fastfood", "universities"});
    REQUIRE(r.locations.size() == 1);
    CHECK(kb.locations()[r.locations[0]].name == "London");
    CHECK(r.predicate == "contains");
}

TEST_CASE("unknown and ambiguous entities") {
    try {
        extract("Show me all pois in atlantis", london().kb());
        FAIL("expected UnknownEntity");
    } catch (const EntityError& e) {
        CHECK(e.code() == ErrorCode::UnknownEntity);
        CHECK(e.span() == "atlantis");
        CHECK(e.suggestions().size() == 3);
    }
    // misspellings within the fuzzy threshold still ground
    auto r = extract("How many pois are in Hackny?", london().kb());
    REQUIRE(r.locations.size() == 1);
    CHECK(london().kb().locations()[r.locations[0]].name == "Hackney");

    geo::Point p{1, 1};
    catalog::KnowledgeBase kb({}, {{0, "Twin Peak", catalog::AttrKind::Point, p, "a", 0},
                                   {1, "Twin Peak", catalog::AttrKind::Point, p, "b", 0}},
                              {});
    try {
        extract("show twin peak", kb);
        FAIL("expected AmbiguousEntity");
    } catch (const EntityError& e) {
        CHECK(e.code() == ErrorCode::AmbiguousEntity);
        CHECK(e.suggestions().size() == 2);
    }
}

TEST_CASE("reversed periods are rejected") {
    CHECK(code_of([] { extract("Which vehicles were moving between 11am and 6am?", minicity().kb()); }) ==
          ErrorCode::InvalidPeriod);
}

TEST_CASE("distances normalize to meters") {
    auto r = extract("Show pois within 0.15 km of Hackney", london().kb());
    REQUIRE(r.distance);
    CHECK(r.distance->unit == "km");
    CHECK(r.distance->meters() == 150);
    CHECK(to_slots(r, london().kb()).distance == 150);
}

TEST_CASE("extraction recovers the bound slots of generated queries") {
    for (const auto* db : {&minicity(), &london()}) {
        for (const auto& e : corpus::generate(*db, 1000, 2024)) {
            corpus::Slots got;
            try {
                got = to_slots(extract(e.nlq, db->kb()), db->kb());
            } catch (const Error& err) {
                FAIL_CHECK(e.nlq << ": " << err.what());
                continue;
            }
            INFO(e.nlq);
            CHECK(got.relations == e.slots.relations);
            CHECK(got.location == e.slots.location);
            CHECK(got.object == e.slots.object);
            CHECK(got.k == e.slots.k);
            CHECK(got.distance == e.slots.distance);
            CHECK(got.period == e.slots.period);
            CHECK(got.agg == e.slots.agg);
            CHECK(got.predicate == e.slots.predicate);
        }
    }
}

TEST_CASE("from_slots mirrors extraction") {
    const auto& kb = minicity().kb();
    for (const auto& e : corpus::generate(minicity(), 200, 9)) {
        CHECK(to_slots(from_slots(e.slots, kb), kb) == e.slots);
    }
}

TEST_CASE("lexicon covers the template vocabulary and never shadows an entity name") {
    const auto& lex = Lexicon::bundled();
    CHECK(lex.stopwords.size() >= 45);
    CHECK(lex.stopwords.size() <= 60);
    std::regex slot("\xE2\x9F\xA8[^\xE2]*\xE2\x9F\xA9");
    for (const auto& t : corpus::TemplateBank::bundled().templates()) {
        std::string literal = std::regex_replace(t.pattern, slot, " ");
        for (const auto& tok : tokenize(literal)) {
            INFO(t.id << " " << tok.text);
            CHECK((lex.is_stopword(tok.text) || lex.is_keyword(tok.text)));
        }
    }
    for (const auto* db : {&minicity(), &london()}) {
        for (const auto& loc : db->kb().locations()) {
            auto toks = tokenize(loc.name);
            INFO(loc.name);
            CHECK_FALSE(lex.is_stopword(toks.front().text));
            CHECK_FALSE(lex.is_stopword(toks.back().text));
            for (const auto& t : toks) CHECK_FALSE(lex.is_keyword(t.text));
        }
    }
}

TEST_CASE("classifier training is deterministic and accurate on a held-out split") {
    auto corpus = corpus::generate(london(), 700, 77);
    std::vector<corpus::CorpusEntry> train(corpus.begin(), corpus.begin() + 560);
    std::vector<corpus::CorpusEntry> test(corpus.begin() + 560, corpus.end());
    auto a = train_classifier(train, 3);
    auto b = train_classifier(train, 3);
    CHECK(a->weights() == b->weights());
    CHECK(a->bias() == b->bias());
    CHECK(a->vocabulary() == b->vocabulary());
    auto c = train_classifier(train, 4);
    CHECK(c->weights() != a->weights());

    std::size_t correct = 0;
    for (const auto& e : test) correct += a->classify(e.nlq).type == e.type;
    CHECK(static_cast<double>(correct) / test.size() >= 0.95);

    auto cls = a->classify(test.front().nlq);
    double sum = 0;
    for (double s : cls.scores) sum += s;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(a->classify(test.front().nlq).scores == cls.scores);
}

TEST_CASE("classifier fallbacks, data checks and serialization") {
    auto corpus = corpus::generate(minicity(), 140, 1);
    auto clf = train_classifier(corpus, 1);
    // no known feature: the largest bias decides
    auto oov = clf->classify("zzqx qqzv");
    auto best = std::max_element(clf->bias().begin(), clf->bias().end()) - clf->bias().begin();
    CHECK(static_cast<std::ptrdiff_t>(oov.type) == best);

    // ties between equal scores go to the earlier type
    LinearClassifier flat({"x"}, std::vector<std::vector<double>>(7, {0.0}), std::vector<double>(7, 0.0));
    CHECK(flat.classify("x").type == QueryType::BasicSpatial);

    std::vector<corpus::CorpusEntry> no_joins;
    for (const auto& e : corpus) {
        if (e.type != QueryType::Join) no_joins.push_back(e);
    }
    CHECK(code_of([&] { train_classifier(no_joins, 1); }) == ErrorCode::InsufficientData);

    TempDir dir;
    save_classifier(*clf, dir.path() / "m.json");
    auto loaded = load_classifier(dir.path() / "m.json");
    for (const auto& e : corpus) CHECK(loaded->classify(e.nlq).scores == clf->classify(e.nlq).scores);
    dir.write("bad.json", "{\"version\": \"other\"}");
    CHECK(code_of([&] { load_classifier(dir.path() / "bad.json"); }) == ErrorCode::ModelLoadError);
    dir.write("junk.json", "not json");
    CHECK(code_of([&] { load_classifier(dir.path() / "junk.json"); }) == ErrorCode::ModelLoadError);
    CHECK(code_of([&] { load_classifier(dir.path() / "none.json"); }) == ErrorCode::ModelLoadError);
}

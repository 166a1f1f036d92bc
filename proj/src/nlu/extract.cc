#include "nlstplan/nlu/extract.h"

#include <algorithm>
#include <cmath>

#include "nlstplan/error.h"

namespace nlstplan::nlu {

using catalog::KBMatch;
using catalog::KnowledgeBase;
using catalog::MatchKind;

namespace {

constexpr std::size_t kMaxWindow = 8;

enum class Role { Stop, Keyword, Content, Numeric, Other };

bool is_value_kind(MatchKind k) { return k != MatchKind::Relation; }

std::vector<std::string> suggestion_names(const KnowledgeBase& kb, const std::string& span) {
    std::vector<std::string> out;
    for (const auto& m : kb.suggest(span, 3)) {
        switch (m.kind) {
            case MatchKind::Relation: out.push_back(kb.relations()[m.index].relation); break;
            case MatchKind::Location: out.push_back(kb.locations()[m.index].name); break;
            case MatchKind::Object: out.push_back(kb.objects()[m.index].name); break;
        }
    }
    return out;
}

class Extractor {
public:
    Extractor(const CoarseTags& tags, const KnowledgeBase& kb, const Lexicon& lex)
        : tags_(tags), kb_(kb), roles_(tags.tokens.size(), Role::Other), consumed_(tags.tokens.size(), false) {
        for (std::size_t i = 0; i < tags.tokens.size(); ++i) {
            if (lex.is_stopword(tok(i))) roles_[i] = Role::Stop;
        }
        for (const auto& s : tags.numbers) {
            for (std::size_t i = s.first_token; i < s.last_token; ++i) roles_[i] = Role::Numeric;
        }
        for (const auto& s : tags.info) {
            for (std::size_t i = s.first_token; i < s.last_token; ++i) {
                roles_[i] = lex.is_keyword(tok(i)) ? Role::Keyword : Role::Content;
            }
        }
    }

    ExtractionResult run() {
        bind_objects_with_numbers();
        exact_pass();
        fuzzy_pass();
        report_leftovers();

        std::sort(result_.groundings.begin(), result_.groundings.end(),
                  [](const Grounding& a, const Grounding& b) { return a.first_token < b.first_token; });
        for (const auto& g : result_.groundings) {
            switch (g.kind) {
                case MatchKind::Relation: result_.relations.push_back(kb_.relations()[g.index].relation); break;
                case MatchKind::Location: result_.locations.push_back(g.index); break;
                case MatchKind::Object: result_.objects.push_back(g.index); break;
            }
        }
        read_numbers();
        read_keywords();
        return std::move(result_);
    }

private:
    const std::string& tok(std::size_t i) const { return tags_.tokens[i].text; }
    std::size_t size() const { return tags_.tokens.size(); }
    bool free_content(std::size_t i) const { return i < size() && roles_[i] == Role::Content && !consumed_[i]; }

    std::string surface(std::size_t first, std::size_t last) const {
        std::string s;
        for (std::size_t i = first; i < last; ++i) {
            if (i > first) s += ' ';
            s += tok(i);
        }
        return s;
    }

    /// The input text covering tokens [first, last).
    std::string original(std::size_t first, std::size_t last) const {
        std::size_t b = tags_.tokens[first].begin;
        return tags_.input.substr(b, tags_.tokens[last - 1].end - b);
    }

    /// A window may hold stop-words inside but must start and end on unconsumed content words.
    bool window_ok(std::size_t first, std::size_t last) const {
        if (!free_content(first) || !free_content(last - 1)) return false;
        for (std::size_t i = first + 1; i + 1 < last; ++i) {
            if (!(free_content(i) || roles_[i] == Role::Stop)) return false;
        }
        return true;
    }

    /// Picks among equally scored matches; value-level entities outrank relations.
    std::optional<KBMatch> choose(const std::vector<KBMatch>& matches, const std::string& span) const {
        if (matches.empty()) return std::nullopt;
        const double top = matches.front().score;
        std::vector<KBMatch> values;
        std::vector<KBMatch> rels;
        for (const auto& m : matches) {
            if (m.score != top) break;
            (is_value_kind(m.kind) ? values : rels).push_back(m);
        }
        const auto& pool = values.empty() ? rels : values;
        if (pool.size() > 1 && top == 1.0) {
            std::vector<std::string> names;
            for (const auto& m : pool) names.push_back(describe(m));
            throw EntityError(ErrorCode::AmbiguousEntity, span, names, "ambiguous entity '" + span + "'");
        }
        return pool.front();
    }

    std::string describe(const KBMatch& m) const {
        switch (m.kind) {
            case MatchKind::Relation: return kb_.relations()[m.index].relation;
            case MatchKind::Location: return kb_.locations()[m.index].relation + ":" + kb_.locations()[m.index].name;
            case MatchKind::Object: return kb_.objects()[m.index].relation + ":" + kb_.objects()[m.index].name;
        }
        return {};
    }

    void accept(const KBMatch& m, std::size_t first, std::size_t last) {
        for (std::size_t i = first; i < last; ++i) consumed_[i] = true;
        // "City of London District": the location's own relation name right after it is part of the name
        if (m.kind == MatchKind::Location && free_content(last)) {
            for (const auto& r : kb_.lookup_exact(tok(last))) {
                if (r.kind == MatchKind::Relation && kb_.relations()[r.index].relation == kb_.locations()[m.index].relation) {
                    consumed_[last] = true;
                    ++last;
                    break;
                }
            }
        }
        Grounding g;
        g.kind = m.kind;
        g.index = m.index;
        g.score = m.score;
        g.first_token = first;
        g.span = original(first, last);
        result_.groundings.push_back(std::move(g));
    }

    /// "train 5": a content word followed by a NUMBER that together name an object.
    void bind_objects_with_numbers() {
        for (const auto& s : tags_.numbers) {
            if (s.label != Label::NUMBER || s.first_token == 0) continue;
            std::size_t i = s.first_token - 1;
            if (!free_content(i)) continue;
            std::string name = tok(i) + tok(s.first_token);
            for (const auto& m : kb_.lookup_exact(name)) {
                if (m.kind == MatchKind::Object) {
                    accept(m, i, s.last_token);
                    break;
                }
            }
        }
    }

    void exact_pass() {
        for (std::size_t len = std::min(kMaxWindow, size()); len >= 1; --len) {
            for (std::size_t i = 0; i + len <= size(); ++i) {
                if (!window_ok(i, i + len)) continue;
                if (auto m = choose(kb_.lookup_exact(surface(i, i + len)), original(i, i + len))) accept(*m, i, i + len);
            }
        }
    }

    void fuzzy_pass() {
        for (std::size_t len = std::min(kMaxWindow, size()); len >= 1; --len) {
            for (std::size_t i = 0; i + len <= size(); ++i) {
                if (!window_ok(i, i + len)) continue;
                if (auto m = choose(kb_.lookup(surface(i, i + len)), original(i, i + len))) accept(*m, i, i + len);
            }
        }
    }

    void report_leftovers() {
        for (std::size_t i = 0; i < size(); ++i) {
            if (!free_content(i)) continue;
            std::size_t j = i + 1;
            while (j < size() && free_content(j)) ++j;
            std::string span = original(i, j);
            throw EntityError(ErrorCode::UnknownEntity, span, suggestion_names(kb_, span),
                              "unknown entity '" + span + "'");
        }
    }

    void read_numbers() {
        std::vector<double> times;
        for (const auto& s : tags_.numbers) {
            switch (s.label) {
                case Label::CARDINAL:
                    if (!result_.k && s.value >= 1) result_.k = static_cast<int>(s.value);
                    break;
                case Label::QUANTITY:
                    if (!result_.distance && s.value > 0) result_.distance = Distance{s.value, s.unit};
                    break;
                case Label::TIME: times.push_back(s.value); break;
                default: break;
            }
        }
        if (times.size() >= 2) {
            auto a = static_cast<std::int64_t>(times[0]);
            auto b = static_cast<std::int64_t>(times[1]);
            if (a >= b) throw Error(ErrorCode::InvalidPeriod, "period start is not before its end");
            result_.period = geo::Period(a, b);
        }
    }

    void read_keywords() {
        for (std::size_t i = 0; i < size(); ++i) {
            const std::string& w = tok(i);
            const std::string next = i + 1 < size() ? tok(i + 1) : std::string();
            if (w == "nearest" || w == "closest" || w.starts_with("neighbo")) result_.nn = true;
            if (!result_.agg) {
                if ((w == "how" && next == "many") || w == "count" || (w == "number" && next == "of")) {
                    result_.agg = "count";
                } else if (w == "average" || w == "mean") {
                    result_.agg = "avg";
                } else if (w == "longest" || w == "largest" || w == "biggest" || w == "maximum") {
                    result_.agg = "max";
                } else if (w == "shortest" || w == "smallest" || w == "minimum") {
                    result_.agg = "min";
                }
            }
            if (!result_.predicate) {
                if (w.starts_with("intersect") || w.starts_with("cross")) {
                    result_.predicate = "intersects";
                } else if (((w == "at" || w == "in") && next == "each") || w == "inside" || w.starts_with("contain")) {
                    result_.predicate = "contains";
                }
            }
        }
    }

    const CoarseTags& tags_;
    const KnowledgeBase& kb_;
    std::vector<Role> roles_;
    std::vector<bool> consumed_;
    ExtractionResult result_;
};

}  // namespace

double Distance::meters() const {
    double m = unit == "km" ? value * 1000 : value;
    return std::round(m * 1e6) / 1e6;
}

ExtractionResult fine_extract(const CoarseTags& tags, const KnowledgeBase& kb, const Lexicon& lex) {
    return Extractor(tags, kb, lex).run();
}

ExtractionResult extract(std::string_view nlq, const KnowledgeBase& kb) { return fine_extract(coarse_tag(nlq), kb); }

corpus::Slots to_slots(const ExtractionResult& r, const KnowledgeBase& kb) {
    corpus::Slots s;
    s.relations = r.relations;
    if (!r.locations.empty()) s.location = kb.locations()[r.locations.front()].name;
    if (!r.objects.empty()) s.object = kb.objects()[r.objects.front()].name;
    s.k = r.k;
    if (r.distance) s.distance = r.distance->meters();
    s.period = r.period;
    s.agg = r.agg;
    s.predicate = r.predicate;
    return s;
}

ExtractionResult from_slots(const corpus::Slots& s, const KnowledgeBase& kb) {
    ExtractionResult r;
    auto find = [&](const std::string& name, MatchKind kind) -> std::uint32_t {
        for (const auto& m : kb.lookup_exact(name)) {
            if (m.kind == kind) return m.index;
        }
        throw EntityError(ErrorCode::UnknownEntity, name, suggestion_names(kb, name), "unknown entity '" + name + "'");
    };
    for (const auto& rel : s.relations) r.relations.push_back(kb.relations()[find(rel, MatchKind::Relation)].relation);
    if (s.location) r.locations.push_back(find(*s.location, MatchKind::Location));
    if (s.object) r.objects.push_back(find(*s.object, MatchKind::Object));
    r.k = s.k;
    if (s.distance) r.distance = Distance{*s.distance, "m"};
    r.period = s.period;
    r.agg = s.agg;
    r.predicate = s.predicate;
    return r;
}

}  // namespace nlstplan::nlu

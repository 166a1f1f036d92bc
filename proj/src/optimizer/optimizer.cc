#include "nlstplan/optimizer/optimizer.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "nlstplan/error.h"
#include "nlstplan/planner/exec.h"

namespace nlstplan::optimizer {

using planner::Expr;
using planner::OpKind;
using planner::PhysicalOp;
using planner::PhysicalPlan;

namespace {

void conjuncts(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::Binary && e.name == "and") {
        conjuncts(e.args[0], out);
        conjuncts(e.args[1], out);
    } else {
        out.push_back(&e);
    }
}

const geo::Geometry* geometry_literal(const Expr& e) {
    if (e.kind != Expr::Kind::Literal) return nullptr;
    return std::get_if<geo::Geometry>(&e.value);
}

struct Restriction {
    std::string attr;
    geo::Rect rect;
};

/// Spatial restriction of one attribute to a window: contains/intersects against a literal
/// geometry, or distance to one bounded from above.
std::optional<Restriction> restriction(const Expr& e) {
    auto pair = [](const Expr& a, const Expr& b) -> std::optional<Restriction> {
        if (a.kind == Expr::Kind::Attr) {
            if (const auto* g = geometry_literal(b)) return Restriction{a.name, geo::bbox(*g)};
        }
        if (b.kind == Expr::Kind::Attr) {
            if (const auto* g = geometry_literal(a)) return Restriction{b.name, geo::bbox(*g)};
        }
        return std::nullopt;
    };
    if ((e.kind == Expr::Kind::Call && (e.name == "contains" || e.name == "intersects") && e.args.size() == 2) ||
        (e.kind == Expr::Kind::Binary && e.name == "intersects")) {
        return pair(e.args[0], e.args[1]);
    }
    if (e.kind == Expr::Kind::Binary && (e.name == "<=" || e.name == "<")) {
        const Expr& call = e.args[0];
        const Expr& bound = e.args[1];
        if (call.kind != Expr::Kind::Call || call.name != "distance" || call.args.size() != 2) return std::nullopt;
        if (bound.kind != Expr::Kind::Literal) return std::nullopt;
        const auto* d = std::get_if<double>(&bound.value);
        if (!d || *d < 0) return std::nullopt;
        auto r = pair(call.args[0], call.args[1]);
        if (r) r->rect = r->rect.expanded(*d);
        return r;
    }
    return std::nullopt;
}

/// Calls `fn(op)` on every filter whose child is a feed, depth first, left to right.
template <typename Fn>
void for_each_site(PhysicalOp& op, Fn&& fn) {
    if (op.kind == OpKind::Filter && op.children.size() == 1 && op.children[0].kind == OpKind::Feed) fn(op);
    for (auto& c : op.children) for_each_site(c, fn);
}

template <typename Fn>
void for_each_site(const PhysicalOp& op, Fn&& fn) {
    if (op.kind == OpKind::Filter && op.children.size() == 1 && op.children[0].kind == OpKind::Feed) fn(op);
    for (const auto& c : op.children) for_each_site(c, fn);
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

}  // namespace

double estimate_filter_rate(const Expr& pred, const catalog::Relation& rel, std::size_t sample_size, std::uint64_t seed) {
    if (sample_size == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
    planner::BoundPredicate bound(pred, rel.attributes());
    const std::size_t n = rel.size();
    if (n == 0) return 1.0;
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const std::size_t m = std::min(sample_size, n);
    if (m < n) {
        std::mt19937_64 rng(seed);
        for (std::size_t j = 0; j < m; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, n - 1);
            std::swap(ids[j], ids[pick(rng)]);
        }
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j < m; ++j) hits += bound.test(rel.tuple(ids[j])) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(m);
}

double plan_selectivity(const PhysicalPlan& p, const catalog::Database& db, std::size_t sample_size, std::uint64_t seed) {
    double best = 1.0;
    for_each_site(p.root, [&](const PhysicalOp& f) {
        best = std::min(best, estimate_filter_rate(*f.predicate, db.relation(f.children[0].relation), sample_size, seed));
    });
    return best;
}

CandidateSet enumerate_candidates(const PhysicalPlan& baseline, const catalog::Database& db, double selectivity,
                                  double threshold) {
    CandidateSet out{baseline, {}};
    if (selectivity > threshold) return out;
    // sites are addressed by visit order so each variant rewrites exactly one of them
    std::size_t n_sites = 0;
    for_each_site(baseline.root, [&](const PhysicalOp&) { ++n_sites; });
    for (std::size_t site = 0; site < n_sites; ++site) {
        const PhysicalOp* target = nullptr;
        std::size_t i = 0;
        for_each_site(baseline.root, [&](const PhysicalOp& f) {
            if (i++ == site) target = &f;
        });
        const std::string& rel_name = target->children[0].relation;
        const catalog::Relation& rel = db.relation(rel_name);
        std::vector<const Expr*> parts;
        conjuncts(*target->predicate, parts);
        std::vector<std::string> done;
        for (const Expr* part : parts) {
            auto r = restriction(*part);
            if (!r || !rel.index(r->attr)) continue;
            if (std::find(done.begin(), done.end(), r->attr) != done.end()) continue;
            done.push_back(r->attr);
            PhysicalPlan variant = baseline;
            std::size_t j = 0;
            for_each_site(variant.root, [&](PhysicalOp& f) {
                if (j++ == site) f.children[0] = PhysicalOp::window(catalog::index_id(rel_name, r->attr), rel_name, r->rect);
            });
            out.indexed.push_back(std::move(variant));
        }
    }
    return out;
}

Choice choose_plan(const CandidateSet& cands, const catalog::Database& db, double sample_fraction, std::uint64_t seed,
                   int runs) {
    if (!(sample_fraction > 0 && sample_fraction <= 1)) {
        throw Error(ErrorCode::InvalidArgument, "sample fraction must be in (0, 1]");
    }
    if (runs < 1) throw Error(ErrorCode::InvalidArgument, "runs must be at least 1");
    Choice out{cands.baseline, {}};
    if (cands.indexed.empty()) return out;

    const catalog::Database sample = db.sample(sample_fraction, seed);
    std::vector<const PhysicalPlan*> all{&cands.baseline};
    for (const auto& p : cands.indexed) all.push_back(&p);
    for (const PhysicalPlan* p : all) {
        std::vector<double> times;
        for (int r = 0; r < runs; ++r) times.push_back(planner::execute(*p, sample).elapsed_ms);
        CostEstimate e;
        e.plan = *p;
        e.sampled_ms = median(std::move(times));
        e.sample_fraction = sample_fraction;
        e.predicted_ms = e.sampled_ms / sample_fraction;
        out.estimates.push_back(std::move(e));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.estimates.size(); ++i) {
        if (out.estimates[i].predicted_ms < out.estimates[best].predicted_ms) best = i;
    }
    if (!out.estimates[best].plan.uses_index()) {
        const double limit = out.estimates[best].predicted_ms * (1 + kTieMargin);
        std::optional<std::size_t> alt;
        for (std::size_t i = 0; i < out.estimates.size(); ++i) {
            const auto& e = out.estimates[i];
            if (e.plan.uses_index() && e.predicted_ms <= limit && (!alt || e.predicted_ms < out.estimates[*alt].predicted_ms)) alt = i;
        }
        if (alt) best = *alt;
    }
    out.estimates[best].chosen = true;
    out.plan = out.estimates[best].plan;
    return out;
}

nlohmann::json report_json(const Choice& c) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& e : c.estimates) {
        cands.push_back({{"plan", planner::render_plan(e.plan)},
                         {"sampled_ms", e.sampled_ms},
                         {"predicted_ms", e.predicted_ms},
                         {"sample_fraction", e.sample_fraction},
                         {"uses_index", e.plan.uses_index()},
                         {"chosen", e.chosen}});
    }
    return {{"candidates", cands}, {"chosen", planner::render_plan(c.plan)}};
}

}  // namespace nlstplan::optimizer

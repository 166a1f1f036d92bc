#include <random>

#include "doctest.h"
#include "nlstplan/error.h"
#include "nlstplan/geo/rtree.h"
#include "support/oracles.h"

using namespace nlstplan;
using namespace nlstplan::geo;

namespace {

std::vector<RTreeEntry> grid_entries() {
    std::vector<RTreeEntry> out;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            out.push_back({Rect{double(i), double(j), i + 1.0, j + 1.0}, static_cast<TupleId>(i * 10 + j)});
    return out;
}

std::vector<RTreeEntry> random_entries(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> c(0, 1000);
    std::uniform_real_distribution<double> s(0, 40);
    std::vector<RTreeEntry> out;
    for (int i = 0; i < n; ++i) {
        double x = c(rng), y = c(rng);
        out.push_back({Rect{x, y, x + s(rng), y + s(rng)}, static_cast<TupleId>(i)});
    }
    return out;
}

Rect random_window(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-50, 1000);
    std::uniform_real_distribution<double> s(0, 300);
    double x = c(rng), y = c(rng);
    return {x, y, x + s(rng), y + s(rng)};
}

/// Checks fill bounds, containment and balance; returns the leaf depth.
std::size_t check_node(const RTree& t, std::uint32_t idx, bool is_root, std::size_t depth) {
    const auto& node = t.nodes()[idx];
    if (!is_root) {
        REQUIRE(node.children.size() >= (t.fanout() + 1) / 2);
    }
    REQUIRE(node.children.size() <= t.fanout());
    if (node.leaf) {
        for (auto c : node.children) REQUIRE(node.rect.contains(t.entries()[c].rect));
        return depth;
    }
    std::size_t leaf_depth = 0;
    for (auto c : node.children) {
        REQUIRE(node.rect.contains(t.nodes()[c].rect));
        std::size_t d = check_node(t, c, false, depth + 1);
        if (leaf_depth == 0) leaf_depth = d;
        REQUIRE(d == leaf_depth);
    }
    return leaf_depth;
}

}  // namespace

TEST_CASE("single entry gives a height-1 tree") {
    RTree t = rtree_bulk_load({{Rect{1, 1, 2, 2}, 42}});
    CHECK(t.height() == 1);
    CHECK(t.root().leaf);
    CHECK(t.root().children.size() == 1);
    CHECK(rtree_window(t, Rect{0, 0, 5, 5}) == std::vector<TupleId>{42});
}

TEST_CASE("10x10 grid, fanout 8, full window returns every id") {
    auto entries = grid_entries();
    RTree t = rtree_bulk_load(entries, 8);
    CHECK(rtree_window(t, Rect{0, 0, 10, 10}) == oracle::linear_scan(entries, Rect{0, 0, 10, 10}));
    CHECK(rtree_window(t, Rect{0, 0, 10, 10}).size() == 100);
    CHECK(rtree_window(t, Rect{20, 20, 30, 30}).empty());
    // closed boundaries: touching the corner of cell (9,9) only
    CHECK(rtree_window(t, Rect{10, 10, 11, 11}) == std::vector<TupleId>{99});
}

TEST_CASE("empty input and tiny fanout are rejected") {
    try {
        rtree_bulk_load({});
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
    CHECK_THROWS_AS(rtree_bulk_load(grid_entries(), 3), Error);
}

TEST_CASE("structural invariants across sizes and fanouts") {
    std::mt19937_64 rng(11);
    for (std::size_t fanout : {4u, 5u, 8u, 16u}) {
        for (int n : {1, 2, 7, 8, 9, 17, 63, 64, 65, 100, 257, 1000}) {
            auto entries = random_entries(rng, n);
            RTree t = rtree_bulk_load(entries, fanout);
            check_node(t, t.root_index(), true, 1);
            CHECK(t.size() == static_cast<std::size_t>(n));
        }
    }
}

TEST_CASE("window equals linear scan on a random 200-rect instance") {
    std::mt19937_64 rng(99);
    auto entries = random_entries(rng, 200);
    RTree t = rtree_bulk_load(entries);
    for (int i = 0; i < 50; ++i) {
        Rect w = random_window(rng);
        REQUIRE(rtree_window(t, w) == oracle::linear_scan(entries, w));
    }
}

TEST_CASE("bulk load is deterministic") {
    std::mt19937_64 rng(5);
    auto entries = random_entries(rng, 500);
    CHECK(rtree_bulk_load(entries).structural_hash() == rtree_bulk_load(entries).structural_hash());
    auto reversed = entries;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(rtree_bulk_load(reversed).window(Rect{0, 0, 500, 500}) ==
          rtree_bulk_load(entries).window(Rect{0, 0, 500, 500}));
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nlstplan/geo/geometry.h"

namespace nlstplan::geo {

using TupleId = std::uint32_t;

struct RTreeEntry {
    Rect rect;
    TupleId id = 0;
};

/// Static, height-balanced R-tree packed with Sort-Tile-Recursive.
///
/// Nodes live in one flat vector; leaves store entries, inner nodes store child node
/// indices. Every non-root node holds between ceil(M/2) and M children.
class RTree {
public:
    static constexpr std::size_t kDefaultFanout = 8;

    struct Node {
        Rect rect = Rect::empty();
        bool leaf = true;
        /// entry indices (leaf) or node indices (inner)
        std::vector<std::uint32_t> children;
    };

    /// Throws EmptyInput for no entries, InvalidArgument for fanout < 4.
    static RTree bulk_load(std::vector<RTreeEntry> entries, std::size_t fanout = kDefaultFanout);

    /// Ids whose rect intersects `window` (closed), ascending.
    std::vector<TupleId> window(const Rect& window) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t fanout() const { return fanout_; }
    /// Levels from root to leaves; a single leaf root has height 1.
    std::size_t height() const { return height_; }
    const Node& root() const { return nodes_[root_]; }
    std::span<const Node> nodes() const { return nodes_; }
    std::span<const RTreeEntry> entries() const { return entries_; }
    std::uint32_t root_index() const { return root_; }

    /// Hash over the node layout; equal inputs in equal order give equal hashes.
    std::uint64_t structural_hash() const;

private:
    std::vector<RTreeEntry> entries_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
    std::size_t fanout_ = kDefaultFanout;
    std::size_t height_ = 0;
};

/// Spec-level names for the index operations.
inline RTree rtree_bulk_load(std::vector<RTreeEntry> entries, std::size_t fanout = RTree::kDefaultFanout) {
    return RTree::bulk_load(std::move(entries), fanout);
}
inline std::vector<TupleId> rtree_window(const RTree& idx, const Rect& w) { return idx.window(w); }

}  // namespace nlstplan::geo

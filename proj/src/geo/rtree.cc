#include "nlstplan/geo/rtree.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "nlstplan/error.h"

namespace nlstplan::geo {

namespace {

struct Item {
    Rect rect;
    std::uint32_t index;
};

/// STR: tile by x into vertical slices, sort each slice by y, cut into runs of `fanout`.
std::vector<std::vector<Item>> str_pack(std::vector<Item> items, std::size_t fanout) {
    const std::size_t n = items.size();
    const std::size_t node_count = (n + fanout - 1) / fanout;
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(node_count))));
    const std::size_t slice_size = slices * fanout;

    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.rect.center().x < b.rect.center().x; });
    for (std::size_t begin = 0; begin < n; begin += slice_size) {
        auto first = items.begin() + static_cast<std::ptrdiff_t>(begin);
        auto last = items.begin() + static_cast<std::ptrdiff_t>(std::min(n, begin + slice_size));
        std::stable_sort(first, last,
                         [](const Item& a, const Item& b) { return a.rect.center().y < b.rect.center().y; });
    }

    std::vector<std::vector<Item>> groups;
    for (std::size_t begin = 0; begin < n; begin += fanout) {
        groups.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(begin),
                            items.begin() + static_cast<std::ptrdiff_t>(std::min(n, begin + fanout)));
    }
    // keep the last node at or above minimum fill by splitting the final two evenly
    const std::size_t min_fill = (fanout + 1) / 2;
    if (groups.size() >= 2 && groups.back().size() < min_fill) {
        auto& prev = groups[groups.size() - 2];
        auto& last = groups.back();
        std::vector<Item> merged = prev;
        merged.insert(merged.end(), last.begin(), last.end());
        std::size_t first_half = (merged.size() + 1) / 2;
        prev.assign(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(first_half));
        last.assign(merged.begin() + static_cast<std::ptrdiff_t>(first_half), merged.end());
    }
    return groups;
}

}  // namespace

RTree RTree::bulk_load(std::vector<RTreeEntry> entries, std::size_t fanout) {
    if (entries.empty()) throw Error(ErrorCode::EmptyInput, "rtree bulk load: no entries");
    if (fanout < 4) throw Error(ErrorCode::InvalidArgument, "rtree fanout must be >= 4");

    RTree tree;
    tree.fanout_ = fanout;
    tree.entries_ = std::move(entries);

    std::vector<Item> level;
    level.reserve(tree.entries_.size());
    for (std::uint32_t i = 0; i < tree.entries_.size(); ++i) level.push_back({tree.entries_[i].rect, i});

    bool leaf = true;
    tree.height_ = 0;
    while (true) {
        ++tree.height_;
        std::vector<std::vector<Item>> groups;
        if (level.size() <= fanout) {
            groups.push_back(level);
        } else {
            groups = str_pack(std::move(level), fanout);
        }
        std::vector<Item> next;
        for (const auto& g : groups) {
            Node node;
            node.leaf = leaf;
            for (const auto& item : g) {
                node.rect.extend(item.rect);
                node.children.push_back(item.index);
            }
            next.push_back({node.rect, static_cast<std::uint32_t>(tree.nodes_.size())});
            tree.nodes_.push_back(std::move(node));
        }
        leaf = false;
        if (next.size() == 1) {
            tree.root_ = next.front().index;
            break;
        }
        level = std::move(next);
    }
    return tree;
}

std::vector<TupleId> RTree::window(const Rect& w) const {
    std::vector<TupleId> out;
    if (nodes_.empty() || !nodes_[root_].rect.intersects(w)) return out;
    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        for (auto child : node.children) {
            if (node.leaf) {
                if (entries_[child].rect.intersects(w)) out.push_back(entries_[child].id);
            } else if (nodes_[child].rect.intersects(w)) {
                stack.push_back(child);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t RTree::structural_hash() const {
    // FNV-1a over node layout and rect bits
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (i * 8)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    auto mix_double = [&mix](double d) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        mix(bits);
    };
    mix(root_);
    mix(height_);
    for (const auto& node : nodes_) {
        mix(node.leaf);
        mix_double(node.rect.xmin);
        mix_double(node.rect.ymin);
        mix_double(node.rect.xmax);
        mix_double(node.rect.ymax);
        for (auto c : node.children) mix(node.leaf ? entries_[c].id : c);
    }
    return h;
}

}  // namespace nlstplan::geo

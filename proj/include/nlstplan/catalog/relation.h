#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlstplan/catalog/value.h"
#include "nlstplan/geo/rtree.h"

namespace nlstplan::catalog {

using geo::TupleId;

struct AttributeDef {
    std::string name;
    AttrKind kind = AttrKind::Text;
    bool indexed = false;
    friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

/// A named table. Tuple ids are row positions.
class Relation {
public:
    Relation() = default;
    /// Throws SchemaMismatch on duplicate attribute names.
    Relation(std::string name, std::vector<AttributeDef> attributes);

    const std::string& name() const { return name_; }
    const std::vector<AttributeDef>& attributes() const { return attrs_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    const Tuple& tuple(TupleId id) const { return tuples_.at(id); }
    std::size_t size() const { return tuples_.size(); }

    /// Appends a row. Throws SchemaMismatch on arity or kind mismatch.
    void add(Tuple t);

    std::optional<std::size_t> find_attr(std::string_view name) const;
    /// Throws InvalidArgument when the attribute does not exist.
    std::size_t attr(std::string_view name) const;

    /// The lexicographically first text attribute; it supplies surface names.
    std::optional<std::size_t> name_attr() const;
    /// First attribute of the given kind.
    std::optional<std::size_t> first_of(AttrKind kind) const;
    /// First point/line/region attribute.
    std::optional<std::size_t> first_spatial() const;

    /// Tuple whose name attribute equals `name` (ASCII case-insensitive), lowest id first.
    std::optional<TupleId> find_by_name(std::string_view name) const;

    /// Bulk-loads an R-tree for every indexed point/line/region attribute with tuples.
    void build_indexes(std::size_t fanout = geo::RTree::kDefaultFanout);
    const geo::RTree* index(std::string_view attr) const;
    const std::map<std::string, geo::RTree>& indexes() const { return indexes_; }

private:
    std::string name_;
    std::vector<AttributeDef> attrs_;
    std::vector<Tuple> tuples_;
    std::map<std::string, geo::RTree> indexes_;
};

/// Index identifier used in plan text: `<relation>_<attribute>_rtree`.
std::string index_id(std::string_view relation, std::string_view attribute);

std::string to_lower(std::string_view s);

}  // namespace nlstplan::catalog

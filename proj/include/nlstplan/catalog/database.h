#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlstplan/catalog/kb.h"
#include "nlstplan/catalog/relation.h"

namespace nlstplan::catalog {

struct AttrExtent {
    std::string attribute;
    AttrKind kind = AttrKind::Point;
    /// Spatial and moving attributes.
    std::optional<geo::Rect> rect;
    /// Temporal attributes (instant, period, mpoint).
    std::optional<geo::Period> period;
};

struct RelationStats {
    std::string relation;
    std::size_t tuple_count = 0;
    std::vector<AttrExtent> extents;
};

RelationStats compute_stats(const Relation& r);

/// Suffix of the unit-ordered companion built for every relation with a moving attribute.
inline constexpr std::string_view kUTOrderedSuffix = "_UTOrdered";
/// Short alias for the companion when a database has exactly one moving relation.
inline constexpr std::string_view kUTOrderedAlias = "UTOrdered";

/// Read-only set of relations with their indexes, knowledge base and statistics.
class Database {
public:
    Database() = default;
    /// Builds indexes, unit-ordered companions, the knowledge base and statistics.
    Database(std::string name, std::vector<Relation> relations);

    const std::string& name() const { return name_; }
    /// Declared relations first, then companions.
    const std::vector<Relation>& relations() const { return relations_; }
    std::size_t declared_count() const { return declared_; }
    bool is_companion(std::string_view relation) const;

    /// Resolves aliases; nullptr when unknown.
    const Relation* find(std::string_view name) const;
    /// Throws UnknownRelation.
    const Relation& relation(std::string_view name) const;
    /// Canonical name for a relation or alias; throws UnknownRelation.
    std::string canonical(std::string_view name) const;
    /// Companion name for a moving relation, nullopt if it has none.
    std::optional<std::string> companion_of(std::string_view relation) const;
    const std::map<std::string, std::string>& aliases() const { return aliases_; }

    const KnowledgeBase& kb() const { return kb_; }
    const RelationStats& stats(std::string_view relation) const;

    /// Uniform sample without replacement of every declared relation: max(min_tuples,
    /// fraction * N) tuples, or the whole relation when smaller. Companions, indexes and the
    /// knowledge base are rebuilt over the sample.
    Database sample(double fraction, std::uint64_t seed, std::size_t min_tuples = 50) const;

private:
    std::string name_;
    std::vector<Relation> relations_;
    std::size_t declared_ = 0;
    std::map<std::string, std::size_t, std::less<>> by_name_;
    std::map<std::string, std::string> aliases_;
    std::map<std::string, RelationStats, std::less<>> stats_;
    KnowledgeBase kb_;
};

/// Loads `catalog.json` plus one TSV per relation. Throws MissingCatalog, SchemaMismatch or
/// BadGeometry; the latter two name the offending row.
Database load_dataset(const std::filesystem::path& dir);

/// Loads every subdirectory of `root` that holds a catalog.json, ordered by directory name.
std::vector<Database> load_all(const std::filesystem::path& root);

/// Throws UnknownRelation.
RelationStats relation_stats(const Database& db, std::string_view relation);

/// Canonical JSON text of relations, indexes, knowledge base and statistics.
std::string serialize(const Database& db);

}  // namespace nlstplan::catalog

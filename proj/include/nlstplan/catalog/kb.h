#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nlstplan/catalog/relation.h"
#include "nlstplan/geo/geometry.h"

namespace nlstplan::catalog {

class Database;

enum class MatchKind { Relation, Location, Object };

std::string_view match_kind_name(MatchKind k);

struct RelationKBEntry {
    std::string relation;
    std::vector<std::string> aliases;
    /// Spatial and temporal attributes.
    std::vector<AttributeDef> st_attributes;
};

struct LocationKBEntry {
    std::uint32_t id = 0;
    std::string name;
    AttrKind kind = AttrKind::Point;
    geo::Geometry geometry;
    std::string relation;
    TupleId tuple = 0;
};

/// A named moving object, e.g. `train5`.
struct ObjectKBEntry {
    std::uint32_t id = 0;
    std::string name;
    std::string relation;
    TupleId tuple = 0;
    std::string attribute;
};

struct KBMatch {
    MatchKind kind = MatchKind::Relation;
    /// Position in the corresponding entry list.
    std::uint32_t index = 0;
    double score = 0;
    /// The alias or name that matched.
    std::string surface;
};

/// Relation knowledge base plus value-level location and object registries.
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    KnowledgeBase(std::vector<RelationKBEntry> relations, std::vector<LocationKBEntry> locations,
                  std::vector<ObjectKBEntry> objects);

    const std::vector<RelationKBEntry>& relations() const { return relations_; }
    const std::vector<LocationKBEntry>& locations() const { return locations_; }
    const std::vector<ObjectKBEntry>& objects() const { return objects_; }

    /// Case-insensitive exact matches (score 1.0) when any exist, otherwise fuzzy matches with
    /// similarity >= kFuzzyThreshold. Sorted by score desc, then kind, then entry id.
    std::vector<KBMatch> lookup(std::string_view phrase) const;

    /// Only the score-1.0 part of lookup; never scans for fuzzy matches.
    std::vector<KBMatch> lookup_exact(std::string_view phrase) const;

    /// The n best-scoring entries regardless of threshold; used for error suggestions.
    std::vector<KBMatch> suggest(std::string_view phrase, std::size_t n) const;

    const RelationKBEntry* relation_entry(std::string_view relation) const;

    static constexpr double kFuzzyThreshold = 0.8;

private:
    struct Surface {
        std::string text;  // lowercased
        MatchKind kind;
        std::uint32_t index;
    };
    std::vector<RelationKBEntry> relations_;
    std::vector<LocationKBEntry> locations_;
    std::vector<ObjectKBEntry> objects_;
    std::vector<Surface> surfaces_;
    std::unordered_multimap<std::string, std::size_t> exact_;
};

/// 1 - levenshtein(a, b) / max(|a|, |b|) over lowercased text; 1.0 for two empty strings.
double name_similarity(std::string_view a, std::string_view b);

/// Relation name, its English singular ("universities" -> "university"), and the name with a
/// trailing "s" stripped or appended.
std::vector<std::string> relation_aliases(std::string_view relation);

KnowledgeBase build_kb(const Database& db);

}  // namespace nlstplan::catalog

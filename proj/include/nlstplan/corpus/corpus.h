#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/query_type.h"
#include "nlstplan/geo/temporal.h"

namespace nlstplan::corpus {

/// Ground-truth slot values of one NLQ. Entity slots hold surface names as stored in the
/// knowledge base; distance is in plane units (meters).
struct Slots {
    /// In order of appearance in the NLQ.
    std::vector<std::string> relations;
    std::optional<std::string> location;
    std::optional<std::string> object;
    std::optional<int> k;
    std::optional<double> distance;
    std::optional<geo::Period> period;
    /// count | avg | max | min
    std::optional<std::string> agg;
    /// contains | intersects, when the wording names a spatial predicate
    std::optional<std::string> predicate;

    friend bool operator==(const Slots&, const Slots&) = default;
};

nlohmann::json to_json(const Slots& s);
/// Throws InvalidArgument on malformed input.
Slots slots_from_json(const nlohmann::json& j);

struct CorpusEntry {
    std::string nlq;
    QueryType type = QueryType::BasicSpatial;
    Slots slots;
    friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

nlohmann::json to_json(const CorpusEntry& e);
CorpusEntry entry_from_json(const nlohmann::json& j);

/// One piece of a template pattern: literal text or a slot reference.
struct PatternPart {
    std::string text;  // literal text, or slot name
    bool slot = false;
    int position = 0;  // relation slot number, 1-based
    std::string modifier;  // sg | word | km | meters | from | raw
};

struct NLQTemplate {
    std::string id;
    QueryType type = QueryType::BasicSpatial;
    std::string group;
    std::string pattern;
    std::vector<PatternPart> parts;
    /// Per relation slot: point | line | region | moving | spatial | extent | any.
    std::vector<std::string> relation_kinds;
    /// point | line | region | any; empty when the pattern has no location.
    std::string location_kind;
    bool object = false;
    /// Slot values implied by the wording (agg, predicate).
    std::optional<std::string> fixed_agg;
    std::optional<std::string> fixed_predicate;

    bool uses(std::string_view slot) const;
};

/// Slot names a pattern may reference.
bool is_slot_name(std::string_view name);

class TemplateBank {
public:
    /// Parses the template JSON. Throws InvalidArgument for unknown slots or types.
    static TemplateBank parse(std::string_view json_text);
    static TemplateBank load(const std::filesystem::path& path);
    /// The bank compiled into the library from templates/templates.json.
    static const TemplateBank& bundled();

    const std::vector<NLQTemplate>& templates() const { return templates_; }
    std::vector<const NLQTemplate*> of_type(QueryType t) const;

private:
    std::vector<NLQTemplate> templates_;
};

/// Exactly n entries, types round-robin then shuffled, so every type gets n/7 (+-1).
/// Deterministic in (db, bank, n, seed); NLQ strings are distinct when the slot space allows.
/// Throws NoTemplates when a type has no template the database can instantiate.
std::vector<CorpusEntry> generate(const catalog::Database& db, std::size_t n, std::uint64_t seed,
                                  const TemplateBank& bank = TemplateBank::bundled());

struct RepairResult {
    CorpusEntry entry;
    bool repaired = false;
};

/// Leaves resolvable entries untouched; otherwise swaps each unresolved entity for its best
/// fuzzy knowledge-base match in both the slots and the NLQ text. Throws Unrepairable.
RepairResult validate_repair(const CorpusEntry& entry, const catalog::KnowledgeBase& kb);

std::vector<CorpusEntry> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries);

}  // namespace nlstplan::corpus

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlstplan/catalog/kb.h"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/geo/temporal.h"
#include "nlstplan/nlu/tagger.h"

namespace nlstplan::nlu {

struct Distance {
    double value = 0;
    std::string unit;  // m | km
    double meters() const;
};

/// One resolved entity mention.
struct Grounding {
    catalog::MatchKind kind = catalog::MatchKind::Relation;
    std::uint32_t index = 0;  // into the KB entry list of `kind`
    std::string span;          // text as written
    double score = 0;
    std::size_t first_token = 0;
};

struct ExtractionResult {
    /// Canonical relation names in order of mention.
    std::vector<std::string> relations;
    /// KB location indices in order of mention.
    std::vector<std::uint32_t> locations;
    /// KB object indices in order of mention.
    std::vector<std::uint32_t> objects;
    std::optional<int> k;
    std::optional<Distance> distance;
    std::optional<geo::Period> period;
    bool nn = false;
    std::optional<std::string> agg;        // count | avg | max | min
    std::optional<std::string> predicate;  // contains | intersects
    std::vector<Grounding> groundings;
};

/// Resolves INFO spans against the knowledge base and reads the numeric slots.
/// Throws UnknownEntity, AmbiguousEntity (both EntityError) and InvalidPeriod.
ExtractionResult fine_extract(const CoarseTags& tags, const catalog::KnowledgeBase& kb,
                              const Lexicon& lex = Lexicon::bundled());

/// coarse_tag followed by fine_extract.
ExtractionResult extract(std::string_view nlq, const catalog::KnowledgeBase& kb);

/// The extraction expressed as corpus slots, so it can be compared against ground truth.
corpus::Slots to_slots(const ExtractionResult& r, const catalog::KnowledgeBase& kb);

/// Slots resolved against the KB by exact name, as the extractor would have produced them.
/// Throws UnknownEntity when a slot names nothing in the KB.
ExtractionResult from_slots(const corpus::Slots& s, const catalog::KnowledgeBase& kb);

}  // namespace nlstplan::nlu

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace nlstplan {

enum class QueryType { BasicSpatial, TimeInterval, Range, NearestNeighbor, Join, Similarity, Aggregation };

inline constexpr std::size_t kQueryTypeCount = 7;

inline constexpr std::array<QueryType, kQueryTypeCount> kAllQueryTypes{
    QueryType::BasicSpatial, QueryType::TimeInterval, QueryType::Range,      QueryType::NearestNeighbor,
    QueryType::Join,         QueryType::Similarity,   QueryType::Aggregation};

std::string_view type_name(QueryType t);
std::optional<QueryType> parse_type(std::string_view name);

}  // namespace nlstplan

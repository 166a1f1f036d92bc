#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlstplan::words {

/// English words for 0..100 ("twenty five" style compounds, "one hundred").
std::optional<std::string> number_to_words(int n);

/// Inverse of number_to_words over lowercased, space-separated words; nullopt if not a number.
std::optional<int> parse_number_words(const std::vector<std::string_view>& tokens);

bool is_number_word(std::string_view token);

/// Plain English singular: "universities" -> "university", "buses" -> "bus", "pois" -> "poi".
std::string singular(std::string_view plural);

/// "train5" -> "train 5"; names without a trailing number are returned unchanged.
std::string split_trailing_number(std::string_view name);

/// Clock text: "6am", "6:30am", "12pm", or 24h "06:30" when `clock24`.
std::string format_time(long long ms, bool clock24);

}  // namespace nlstplan::words

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nlstplan::nlu {

/// Fixed English stop-word list plus the query vocabulary that never names an entity.
struct Lexicon {
    std::set<std::string, std::less<>> stopwords;
    std::set<std::string, std::less<>> keywords;

    bool is_stopword(std::string_view w) const { return stopwords.count(w) > 0; }
    bool is_keyword(std::string_view w) const { return keywords.count(w) > 0; }

    /// Throws InvalidArgument on malformed JSON.
    static Lexicon parse(std::string_view json_text);
    /// Compiled in from templates/lexicon.json.
    static const Lexicon& bundled();
};

struct Token {
    std::string text;  // lowercased
    std::size_t begin = 0;
    std::size_t end = 0;  // byte offsets into the input, half-open
};

/// Lowercased [a-z0-9] runs; '.' and ':' stay inside a token when both neighbours are digits.
std::vector<Token> tokenize(std::string_view text);

enum class Label { TIME, NUMBER, CARDINAL, QUANTITY, INFO };

std::string_view label_name(Label l);

struct TaggedSpan {
    Label label = Label::INFO;
    std::string text;  // substring of the input
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t first_token = 0;
    std::size_t last_token = 0;  // exclusive
    /// TIME: ms after midnight; QUANTITY: magnitude in `unit`; CARDINAL/NUMBER: the number.
    double value = 0;
    std::string unit;  // QUANTITY only: m | km
};

struct CoarseTags {
    std::string input;
    std::vector<Token> tokens;
    std::vector<TaggedSpan> numbers;  // TIME, NUMBER, CARDINAL, QUANTITY in text order
    std::vector<TaggedSpan> info;     // INFO in text order
};

/// Clock token value in ms: "6am", "6:30pm", "18:00". Nullopt otherwise.
std::optional<std::int64_t> parse_time_token(std::string_view token);

/// Throws EmptyInput when the text has no tokens.
CoarseTags coarse_tag(std::string_view nlq, const Lexicon& lex = Lexicon::bundled());

}  // namespace nlstplan::nlu

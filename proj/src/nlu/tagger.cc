#include "nlstplan/nlu/tagger.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "json.hpp"
#include "nlstplan/corpus/words.h"
#include "nlstplan/error.h"

namespace nlstplan::nlu {

namespace detail {
extern const std::string_view kBundledLexicon;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

std::optional<double> parse_decimal(std::string_view s) {
    if (s.empty() || !is_digit(s.front()) || !is_digit(s.back())) return std::nullopt;
    if (std::count(s.begin(), s.end(), '.') > 1) return std::nullopt;
    if (!std::all_of(s.begin(), s.end(), [](char c) { return is_digit(c) || c == '.'; })) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::string> unit_of(std::string_view w) {
    if (w == "m" || w == "meter" || w == "meters" || w == "metre" || w == "metres") return "m";
    if (w == "km" || w == "kilometer" || w == "kilometers" || w == "kilometre" || w == "kilometres") return "km";
    return std::nullopt;
}

bool governs_k(std::string_view w) { return w == "nearest" || w == "closest" || w == "most" || w == "top"; }

}  // namespace

Lexicon Lexicon::parse(std::string_view json_text) {
    try {
        auto doc = nlohmann::json::parse(json_text);
        Lexicon lex;
        for (const auto& w : doc.at("stopwords")) lex.stopwords.insert(w.get<std::string>());
        for (const auto& w : doc.at("keywords")) lex.keywords.insert(w.get<std::string>());
        return lex;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("lexicon: ") + e.what());
    }
}

const Lexicon& Lexicon::bundled() {
    static const Lexicon lex = parse(detail::kBundledLexicon);
    return lex;
}

std::string_view label_name(Label l) {
    switch (l) {
        case Label::TIME: return "TIME";
        case Label::NUMBER: return "NUMBER";
        case Label::CARDINAL: return "CARDINAL";
        case Label::QUANTITY: return "QUANTITY";
        case Label::INFO: return "INFO";
    }
    return "";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(text[i])) {
            ++i;
            continue;
        }
        Token t;
        t.begin = i;
        while (i < text.size()) {
            char c = text[i];
            if (is_alnum(c)) {
                t.text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else if ((c == '.' || c == ':') && i > t.begin && is_digit(text[i - 1]) && i + 1 < text.size() &&
                       is_digit(text[i + 1])) {
                t.text += c;
            } else {
                break;
            }
            ++i;
        }
        t.end = i;
        out.push_back(std::move(t));
    }
    return out;
}

std::optional<std::int64_t> parse_time_token(std::string_view tok) {
    std::string_view suffix;
    if (tok.size() > 2 && (tok.ends_with("am") || tok.ends_with("pm"))) {
        suffix = tok.substr(tok.size() - 2);
        tok.remove_suffix(2);
    }
    std::string_view hh = tok;
    std::string_view mm;
    if (auto colon = tok.find(':'); colon != std::string_view::npos) {
        hh = tok.substr(0, colon);
        mm = tok.substr(colon + 1);
        if (mm.size() != 2 || !all_digits(mm)) return std::nullopt;
    } else if (suffix.empty()) {
        return std::nullopt;  // a bare number is not a clock time
    }
    if (hh.empty() || hh.size() > 2 || !all_digits(hh)) return std::nullopt;
    int h = std::stoi(std::string(hh));
    int m = mm.empty() ? 0 : std::stoi(std::string(mm));
    if (m > 59) return std::nullopt;
    if (!suffix.empty()) {
        if (h < 1 || h > 12) return std::nullopt;
        h %= 12;
        if (suffix == "pm") h += 12;
    } else if (h > 24 || (h == 24 && m != 0)) {
        return std::nullopt;
    }
    return (static_cast<std::int64_t>(h) * 60 + m) * 60000;
}

CoarseTags coarse_tag(std::string_view nlq, const Lexicon& lex) {
    CoarseTags out;
    out.input = std::string(nlq);
    out.tokens = tokenize(nlq);
    const auto& tk = out.tokens;
    if (tk.empty()) throw Error(ErrorCode::EmptyInput, "empty query text");
    const std::size_t n = tk.size();
    std::vector<bool> used(n, false);

    auto add = [&](Label label, std::size_t first, std::size_t last, double value, std::string unit = {}) {
        TaggedSpan s;
        s.label = label;
        s.begin = tk[first].begin;
        s.end = tk[last - 1].end;
        s.text = std::string(nlq.substr(s.begin, s.end - s.begin));
        s.first_token = first;
        s.last_token = last;
        s.value = value;
        s.unit = std::move(unit);
        for (std::size_t i = first; i < last; ++i) used[i] = true;
        (label == Label::INFO ? out.info : out.numbers).push_back(std::move(s));
    };
    auto text = [&](std::size_t i) -> std::string_view { return i < n ? std::string_view(tk[i].text) : ""; };

    // TIME
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (auto ms = parse_time_token(text(i))) {
            add(Label::TIME, i, i + 1, static_cast<double>(*ms));
        } else if (all_digits(text(i)) && (text(i + 1) == "am" || text(i + 1) == "pm")) {
            if (auto t = parse_time_token(std::string(text(i)) + std::string(text(i + 1)))) {
                add(Label::TIME, i, i + 2, static_cast<double>(*t));
            }
        } else if (text(i) == "between" && all_digits(text(i + 1)) && text(i + 2) == "and" &&
                   all_digits(text(i + 3)) && !unit_of(text(i + 4)) && text(i + 1).size() <= 2 &&
                   text(i + 3).size() <= 2) {
            int a = std::stoi(std::string(text(i + 1)));
            int b = std::stoi(std::string(text(i + 3)));
            if (a <= 24 && b <= 24) {
                add(Label::TIME, i + 1, i + 2, a * 3600000.0);
                add(Label::TIME, i + 3, i + 4, b * 3600000.0);
            }
        }
    }
    // QUANTITY
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (auto v = parse_decimal(text(i))) {
            if (auto u = unit_of(text(i + 1)); u && !used[i + 1]) add(Label::QUANTITY, i, i + 2, *v, *u);
            continue;
        }
        std::string_view t = text(i);
        std::size_t split = 0;
        while (split < t.size() && (is_digit(t[split]) || t[split] == '.')) ++split;
        if (split == 0 || split == t.size()) continue;
        auto v = parse_decimal(t.substr(0, split));
        auto u = unit_of(t.substr(split));
        if (v && u) add(Label::QUANTITY, i, i + 1, *v, *u);
    }
    // CARDINAL
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (words::is_number_word(text(i)) || (text(i) == "a" && text(i + 1) == "hundred")) {
            std::size_t len = 0;
            std::optional<int> v;
            if (i + 1 < n && !used[i + 1]) {
                v = words::parse_number_words({text(i), text(i + 1)});
                if (v) len = 2;
            }
            if (!v) {
                v = words::parse_number_words({text(i)});
                len = 1;
            }
            if (v) add(Label::CARDINAL, i, i + len, *v);
        } else if (all_digits(text(i)) && ((i > 0 && governs_k(text(i - 1))) || governs_k(text(i + 1)))) {
            add(Label::CARDINAL, i, i + 1, std::stod(std::string(text(i))));
        }
    }
    // NUMBER
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (auto v = parse_decimal(text(i))) add(Label::NUMBER, i, i + 1, *v);
    }
    std::sort(out.numbers.begin(), out.numbers.end(),
              [](const TaggedSpan& a, const TaggedSpan& b) { return a.begin < b.begin; });
    // INFO: maximal runs of remaining content words
    for (std::size_t i = 0; i < n;) {
        if (used[i] || lex.is_stopword(text(i))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !used[j] && !lex.is_stopword(text(j))) ++j;
        add(Label::INFO, i, j, 0);
        i = j;
    }
    return out;
}

}  // namespace nlstplan::nlu

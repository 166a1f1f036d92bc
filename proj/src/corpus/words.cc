#include "nlstplan/corpus/words.h"

#include <array>
#include <cctype>
#include <cstdio>

namespace nlstplan::words {

namespace {

constexpr std::array<std::string_view, 20> kSmall{
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens{"",      "",      "twenty",  "thirty", "forty",
                                                 "fifty", "sixty", "seventy", "eighty", "ninety"};

std::optional<int> small_value(std::string_view w) {
    for (std::size_t i = 0; i < kSmall.size(); ++i) {
        if (kSmall[i] == w) return static_cast<int>(i);
    }
    return std::nullopt;
}

std::optional<int> tens_value(std::string_view w) {
    for (std::size_t i = 2; i < kTens.size(); ++i) {
        if (kTens[i] == w) return static_cast<int>(i * 10);
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> number_to_words(int n) {
    if (n < 0 || n > 100) return std::nullopt;
    if (n == 100) return std::string("one hundred");
    if (n < 20) return std::string(kSmall[static_cast<std::size_t>(n)]);
    std::string out(kTens[static_cast<std::size_t>(n / 10)]);
    if (n % 10) out += " " + std::string(kSmall[static_cast<std::size_t>(n % 10)]);
    return out;
}

bool is_number_word(std::string_view token) {
    return small_value(token) || tens_value(token) || token == "hundred";
}

std::optional<int> parse_number_words(const std::vector<std::string_view>& tokens) {
    if (tokens.empty()) return std::nullopt;
    if (tokens.size() == 1) {
        if (auto v = small_value(tokens[0])) return v;
        if (auto v = tens_value(tokens[0])) return v;
        if (tokens[0] == "hundred") return 100;
        return std::nullopt;
    }
    if (tokens.size() == 2) {
        if ((tokens[0] == "one" || tokens[0] == "a") && tokens[1] == "hundred") return 100;
        auto t = tens_value(tokens[0]);
        auto u = small_value(tokens[1]);
        if (t && u && *u >= 1 && *u <= 9) return *t + *u;
    }
    return std::nullopt;
}

std::string singular(std::string_view plural) {
    std::string s(plural);
    auto ends = [&](std::string_view suffix) {
        return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends("ies")) return s.substr(0, s.size() - 3) + "y";
    if (ends("ses") || ends("xes") || ends("ches") || ends("shes")) return s.substr(0, s.size() - 2);
    if (ends("s") && !ends("ss")) return s.substr(0, s.size() - 1);
    return s;
}

std::string split_trailing_number(std::string_view name) {
    std::size_t i = name.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
    if (i == 0 || i == name.size()) return std::string(name);
    return std::string(name.substr(0, i)) + " " + std::string(name.substr(i));
}

std::string format_time(long long ms, bool clock24) {
    long long minutes = ms / 60000;
    int h = static_cast<int>((minutes / 60) % 24);
    int m = static_cast<int>(minutes % 60);
    char buf[16];
    if (clock24) {
        std::snprintf(buf, sizeof buf, "%02d:%02d", h, m);
        return buf;
    }
    int h12 = h % 12 == 0 ? 12 : h % 12;
    const char* suffix = h < 12 ? "am" : "pm";
    if (m == 0) {
        std::snprintf(buf, sizeof buf, "%d%s", h12, suffix);
    } else {
        std::snprintf(buf, sizeof buf, "%d:%02d%s", h12, m, suffix);
    }
    return buf;
}

}  // namespace nlstplan::words

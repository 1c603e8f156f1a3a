#include "xlemb/text.hpp"

#include <limits>

#include "xlemb/error.hpp"

namespace xlemb {
namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at s[i] and advances i. Malformed
// sequences yield U+FFFD and consume a single byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kInvalid;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return kInvalid;
    }
    for (int k = 1; k <= extra; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += static_cast<std::size_t>(extra) + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

bool is_lower(char32_t cp) {
    if (cp >= 'a' && cp <= 'z') return true;
    if (cp >= 0xDF && cp <= 0xFF) return cp != 0xF7;
    if (cp >= 0x100 && cp <= 0x17F) {
        if (cp <= 0x137) return cp % 2 == 1;
        if (cp == 0x138 || cp == 0x149 || cp == 0x17F) return true;
        if (cp <= 0x148) return cp % 2 == 0;
        if (cp <= 0x177) return cp % 2 == 1;
        if (cp == 0x178) return false;
        return cp % 2 == 0;
    }
    if (cp >= 0x3AC && cp <= 0x3CE) return true;
    if (cp >= 0x430 && cp <= 0x45F) return true;
    return false;
}

char32_t lower_of(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x17E && !is_lower(cp) && cp != 0x178) {
        if (cp <= 0x137 || (cp >= 0x14A && cp <= 0x177)) return cp + 1;
        if ((cp >= 0x139 && cp <= 0x148) || cp >= 0x179) return cp + 1;
    }
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    return cp;
}

}  // namespace

double lowercase_ratio(std::string_view sentence) {
    std::size_t lower = 0;
    std::size_t other = 0;
    for (std::size_t i = 0; i < sentence.size();) {
        const char32_t cp = next_code_point(sentence, i);
        if (is_space(cp)) continue;
        if (is_lower(cp)) ++lower;
        else ++other;
    }
    if (other == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(lower) / static_cast<double>(other);
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const auto space = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    };
    while (i < sentence.size()) {
        while (i < sentence.size() && space(sentence[i])) ++i;
        const std::size_t start = i;
        while (i < sentence.size() && !space(sentence[i])) ++i;
        if (i > start) out.emplace_back(sentence.substr(start, i - start));
    }
    return out;
}

std::size_t count_tokens_in(std::string_view sentence) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : sentence) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t start = i;
        const char32_t cp = next_code_point(s, i);
        if (cp == kInvalid && i == start + 1) {
            out.push_back(s[start]);
            continue;
        }
        append_utf8(out, lower_of(cp));
    }
    return out;
}

std::vector<RawPair> zip_aligned(std::vector<std::string> l1, std::vector<std::string> l2) {
    if (l1.size() != l2.size()) {
        throw AlignmentError("parallel corpus is misaligned: " + std::to_string(l1.size()) +
                             " vs " + std::to_string(l2.size()) + " lines");
    }
    std::vector<RawPair> out;
    out.reserve(l1.size());
    for (std::size_t i = 0; i < l1.size(); ++i) {
        out.push_back({std::move(l1[i]), std::move(l2[i])});
    }
    return out;
}

std::vector<RawPair> filter_parallel(const std::vector<RawPair>& pairs, double cutoff_l1,
                                     double cutoff_l2, std::size_t min_tokens) {
    std::vector<RawPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (lowercase_ratio(p.l1) < cutoff_l1 || lowercase_ratio(p.l2) < cutoff_l2) continue;
        if (count_tokens_in(p.l1) < min_tokens || count_tokens_in(p.l2) < min_tokens) continue;
        out.push_back(p);
    }
    return out;
}

std::vector<std::string> filter_monolingual(const std::vector<std::string>& lines, double cutoff,
                                            std::size_t min_tokens) {
    std::vector<std::string> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        if (lowercase_ratio(line) < cutoff || count_tokens_in(line) < min_tokens) continue;
        out.push_back(line);
    }
    return out;
}

}  // namespace xlemb

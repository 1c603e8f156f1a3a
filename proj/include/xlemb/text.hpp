#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace xlemb {

/// (lowercase letters) / (non-whitespace characters that are not lowercase
/// letters), counted over UTF-8 code points. +inf when the denominator is 0.
double lowercase_ratio(std::string_view sentence);

/// Splits on ASCII whitespace.
std::vector<std::string> tokenize(std::string_view sentence);
std::size_t count_tokens_in(std::string_view sentence);

/// Lowercases ASCII and the common Latin-1 / Latin Extended-A uppercase
/// letters in a UTF-8 string.
std::string to_lower(std::string_view s);

struct RawPair {
    std::string l1;
    std::string l2;
};

/// Zips two aligned line sequences. Throws AlignmentError on count mismatch.
std::vector<RawPair> zip_aligned(std::vector<std::string> l1, std::vector<std::string> l2);

/// Removes a pair iff either side's lowercase ratio is below its language's
/// cutoff or either side has fewer than `min_tokens` tokens. Order preserved.
std::vector<RawPair> filter_parallel(const std::vector<RawPair>& pairs, double cutoff_l1,
                                     double cutoff_l2, std::size_t min_tokens = 1);

/// Removes sentences below the cutoff or shorter than `min_tokens` tokens.
std::vector<std::string> filter_monolingual(const std::vector<std::string>& lines, double cutoff,
                                            std::size_t min_tokens = 1);

}  // namespace xlemb

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlemb {

using WordId = std::int32_t;

inline constexpr WordId kUnkId = 0;
inline constexpr std::string_view kUnkToken = "<unk>";

/// Token <-> id map for one language. Id 0 is always the UNK entry; the
/// remaining ids are ordered by descending frequency, ties broken by
/// lexicographic token order.
class Vocabulary {
public:
    explicit Vocabulary(std::string language_tag = {});

    /// Builds a vocabulary from token frequencies. Tokens with frequency below
    /// `unk_threshold` are folded into UNK; their counts accumulate there.
    static Vocabulary from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                  std::uint64_t unk_threshold, std::string language_tag = {});

    /// Builds a vocabulary from several frequency tables, each with its own
    /// threshold. A token is retained if any table retains it; its count is
    /// the total over all tables.
    static Vocabulary from_count_tables(
        std::span<const std::unordered_map<std::string, std::uint64_t>> tables,
        std::span<const std::uint64_t> thresholds, std::string language_tag = {});

    /// Constructs directly from tokens in id order (index 0 must be UNK).
    static Vocabulary from_tokens(std::vector<std::string> tokens,
                                  std::vector<std::uint64_t> counts, std::string language_tag = {});

    std::size_t size() const { return id_to_token_.size(); }
    const std::string& language() const { return language_; }

    /// UNK for unknown tokens.
    WordId id(std::string_view token) const;
    bool contains(std::string_view token) const;
    const std::string& token(WordId id) const;
    std::uint64_t count(WordId id) const;
    const std::vector<std::string>& tokens() const { return id_to_token_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    /// Writes `token<TAB>count` lines in id order.
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path, std::string language_tag = {});

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.id_to_token_ == b.id_to_token_ && a.counts_ == b.counts_;
    }

private:
    void index();

    std::string language_;
    std::vector<std::string> id_to_token_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, WordId> token_to_id_;
};

/// Counts whitespace-separated tokens over all lines.
std::unordered_map<std::string, std::uint64_t> count_tokens(std::span<const std::string> lines);

/// build_vocabulary over a token stream.
Vocabulary build_vocabulary(std::span<const std::string> lines, std::uint64_t unk_threshold,
                            std::string language_tag = {});

}  // namespace xlemb

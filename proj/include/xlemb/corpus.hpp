#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xlemb/vocabulary.hpp"

namespace xlemb {

/// Which of the two languages a table, corpus or gradient row belongs to.
enum class Side : std::uint8_t { l1 = 0, l2 = 1 };

inline constexpr std::size_t index_of(Side s) { return static_cast<std::size_t>(s); }

using Sentence = std::vector<WordId>;
using Rng = std::mt19937_64;

inline constexpr std::size_t kMinPhraseLength = 3;

/// Maps whitespace tokens to ids; OOV tokens become UNK.
Sentence encode(std::string_view sentence, const Vocabulary& vocab, bool lowercase = false);
std::string decode(std::span<const WordId> sentence, const Vocabulary& vocab);

/// Monolingual corpus of encoded sentences. Sentences shorter than
/// kMinPhraseLength stay in the corpus but are never sampled.
class MonoCorpus {
public:
    MonoCorpus() = default;
    MonoCorpus(Side side, std::vector<Sentence> sentences);

    Side side() const { return side_; }
    std::size_t size() const { return sentences_.size(); }
    bool empty() const { return sentences_.empty(); }
    const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
    const std::vector<Sentence>& sentences() const { return sentences_; }
    /// Indices of sentences with at least kMinPhraseLength tokens.
    const std::vector<std::uint32_t>& eligible() const { return eligible_; }
    std::uint64_t token_count() const;

private:
    Side side_ = Side::l1;
    std::vector<Sentence> sentences_;
    std::vector<std::uint32_t> eligible_;
};

/// Sentence-aligned corpus; line i of l1 is aligned to line i of l2.
class ParallelCorpus {
public:
    ParallelCorpus() = default;
    ParallelCorpus(std::vector<Sentence> l1, std::vector<Sentence> l2);

    std::size_t size() const { return l1_.size(); }
    bool empty() const { return l1_.empty(); }
    const Sentence& l1(std::size_t i) const { return l1_[i]; }
    const Sentence& l2(std::size_t i) const { return l2_[i]; }
    const std::vector<Sentence>& side(Side s) const { return s == Side::l1 ? l1_ : l2_; }

    /// Keeps only the first n pairs.
    void truncate(std::size_t n);

private:
    std::vector<Sentence> l1_;
    std::vector<Sentence> l2_;
};

std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, std::span<const std::string> lines);

/// Encoded corpus file: one sentence per line, ids separated by spaces.
void save_encoded(const std::filesystem::path& path, std::span<const Sentence> sentences);
/// Throws DataError on malformed lines or ids >= vocab_size.
std::vector<Sentence> load_encoded(const std::filesystem::path& path, std::size_t vocab_size);

}  // namespace xlemb

#pragma once

#include <cstdint>
#include <span>

#include "xlemb/corpus.hpp"

namespace xlemb {

/// Half-open token range [start, end) of one corpus sentence.
struct Span {
    std::uint32_t sentence = 0;
    std::uint32_t start = 0;
    std::uint32_t end = 0;

    std::size_t length() const { return end - start; }
    friend bool operator==(const Span&, const Span&) = default;
};

/// Monolingual training sample: a phrase, a sub-phrase inside it, and a
/// phrase from a (usually different) random sentence.
struct PhraseTriple {
    Span outer;
    Span inner;
    Span noise;
};

inline std::span<const WordId> span_tokens(const MonoCorpus& corpus, const Span& s) {
    return std::span<const WordId>(corpus[s.sentence]).subspan(s.start, s.length());
}

/// Uniform span of at least kMinPhraseLength tokens inside [lo, hi):
/// start ~ U[lo, hi-3], then end ~ U[start+3, hi].
Span sample_span(std::uint32_t sentence, std::uint32_t lo, std::uint32_t hi, Rng& rng);

/// Throws SamplingError when no sentence has kMinPhraseLength tokens.
PhraseTriple sample_phrase_triple(const MonoCorpus& corpus, Rng& rng);

/// Uniform pair index. Throws SamplingError on an empty corpus.
std::size_t sample_bilingual_pair(const ParallelCorpus& corpus, Rng& rng);

}  // namespace xlemb

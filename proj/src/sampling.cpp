#include "xlemb/sampling.hpp"

#include "xlemb/error.hpp"

namespace xlemb {
namespace {

std::uint32_t uniform(std::uint32_t lo, std::uint32_t hi, Rng& rng) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

}  // namespace

Span sample_span(std::uint32_t sentence, std::uint32_t lo, std::uint32_t hi, Rng& rng) {
    constexpr auto kMin = static_cast<std::uint32_t>(kMinPhraseLength);
    if (hi < lo + kMin) throw SamplingError("span range shorter than the minimum phrase length");
    const std::uint32_t start = uniform(lo, hi - kMin, rng);
    const std::uint32_t end = uniform(start + kMin, hi, rng);
    return {sentence, start, end};
}

PhraseTriple sample_phrase_triple(const MonoCorpus& corpus, Rng& rng) {
    const auto& eligible = corpus.eligible();
    if (eligible.empty()) {
        throw SamplingError("monolingual corpus has no sentence with at least 3 tokens");
    }
    const auto last = static_cast<std::uint32_t>(eligible.size() - 1);

    const std::uint32_t outer_sentence = eligible[uniform(0, last, rng)];
    const auto outer_len = static_cast<std::uint32_t>(corpus[outer_sentence].size());
    PhraseTriple t;
    t.outer = sample_span(outer_sentence, 0, outer_len, rng);
    t.inner = sample_span(outer_sentence, t.outer.start, t.outer.end, rng);

    std::uint32_t noise_sentence = eligible[uniform(0, last, rng)];
    if (noise_sentence == outer_sentence) noise_sentence = eligible[uniform(0, last, rng)];
    const auto noise_len = static_cast<std::uint32_t>(corpus[noise_sentence].size());
    t.noise = sample_span(noise_sentence, 0, noise_len, rng);
    return t;
}

std::size_t sample_bilingual_pair(const ParallelCorpus& corpus, Rng& rng) {
    if (corpus.empty()) throw SamplingError("parallel corpus is empty");
    return std::uniform_int_distribution<std::size_t>(0, corpus.size() - 1)(rng);
}

}  // namespace xlemb

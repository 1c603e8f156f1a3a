#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xlemb/corpus.hpp"
#include "xlemb/embedding_table.hpp"

namespace xlemb {

/// add: sum of the word vectors.
/// bi:  sum over adjacent pairs of elementwise tanh(w_{i-1} + w_i).
enum class CompositionKind { add, bi };

std::string_view to_string(CompositionKind kind);
/// Accepts "add" or "bi" (case-insensitive). Throws UsageError otherwise.
CompositionKind parse_composition(std::string_view name);

struct ComposedVector {
    std::vector<double> values;
    std::size_t source_len = 0;

    std::size_t dim() const { return values.size(); }
};

using VectorList = std::vector<std::vector<double>>;

// Direct API over explicit word vectors. These enforce the strict length
// preconditions (add: >= 1 vector, bi: >= 2) and throw CompositionError.
ComposedVector compose_add(const VectorList& words);
ComposedVector compose_bi(const VectorList& words);
ComposedVector compose(CompositionKind kind, const VectorList& words);
/// Per-word gradients of <upstream, compose(kind, words)>.
VectorList compose_backward(CompositionKind kind, const VectorList& words,
                            std::span<const double> upstream);

// Corpus API over table rows. A one-token sentence under bi composes to the
// zero vector; an empty id list throws CompositionError.
ComposedVector compose(CompositionKind kind, const EmbeddingTable& table,
                       std::span<const WordId> ids);
/// Overwrites `out` (size dim) with the composition.
void compose_into(CompositionKind kind, const EmbeddingTable& table, std::span<const WordId> ids,
                  std::span<double> out);
/// Writes the gradient for position i into word_grads[i*dim, (i+1)*dim).
void compose_backward(CompositionKind kind, const EmbeddingTable& table,
                      std::span<const WordId> ids, std::span<const double> upstream,
                      std::span<double> word_grads);

/// Two-level composition: words -> sentence vectors -> document vector, with
/// the same function at both levels. With `strict`, bi requires at least two
/// sentences; otherwise a one-sentence document composes to zero under bi.
ComposedVector compose_document(std::span<const Sentence> document, const EmbeddingTable& table,
                                CompositionKind kind, bool strict = true);

}  // namespace xlemb

#include "xlemb/composition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"

namespace xlemb {
namespace {

// Shared forward/backward over any row accessor `row(i) -> const double*`.

template <class RowFn>
void forward(CompositionKind kind, std::size_t len, std::size_t dim, RowFn row, double* out) {
    std::fill(out, out + dim, 0.0);
    const Kernels& k = kernels();
    if (kind == CompositionKind::add) {
        for (std::size_t i = 0; i < len; ++i) k.add(out, row(i), dim);
        return;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const double* a = row(i - 1);
        const double* b = row(i);
        for (std::size_t j = 0; j < dim; ++j) out[j] += std::tanh(a[j] + b[j]);
    }
}

template <class RowFn>
void backward(CompositionKind kind, std::size_t len, std::size_t dim, RowFn row,
              const double* upstream, double* grads) {
    if (kind == CompositionKind::add) {
        for (std::size_t i = 0; i < len; ++i) std::copy(upstream, upstream + dim, grads + i * dim);
        return;
    }
    std::fill(grads, grads + len * dim, 0.0);
    for (std::size_t i = 1; i < len; ++i) {
        const double* a = row(i - 1);
        const double* b = row(i);
        double* ga = grads + (i - 1) * dim;
        double* gb = grads + i * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            const double t = std::tanh(a[j] + b[j]);
            const double d = (1.0 - t * t) * upstream[j];
            ga[j] += d;
            gb[j] += d;
        }
    }
}

std::size_t checked_dim(const VectorList& words) {
    const std::size_t dim = words.front().size();
    for (const auto& w : words) {
        if (w.size() != dim) throw DimensionError("composition: word vectors differ in dimension");
    }
    return dim;
}

void check_strict_length(CompositionKind kind, std::size_t len) {
    if (kind == CompositionKind::add && len < 1) {
        throw CompositionError("add composition needs at least one vector");
    }
    if (kind == CompositionKind::bi && len < 2) {
        throw CompositionError("bi composition needs at least two vectors");
    }
}

}  // namespace

std::string_view to_string(CompositionKind kind) {
    return kind == CompositionKind::add ? "add" : "bi";
}

CompositionKind parse_composition(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "add") return CompositionKind::add;
    if (lower == "bi") return CompositionKind::bi;
    throw UsageError("unknown composition '" + std::string(name) + "' (expected add or bi)");
}

ComposedVector compose(CompositionKind kind, const VectorList& words) {
    check_strict_length(kind, words.size());
    const std::size_t dim = checked_dim(words);
    ComposedVector out{std::vector<double>(dim), words.size()};
    forward(kind, words.size(), dim, [&](std::size_t i) { return words[i].data(); },
            out.values.data());
    return out;
}

ComposedVector compose_add(const VectorList& words) { return compose(CompositionKind::add, words); }
ComposedVector compose_bi(const VectorList& words) { return compose(CompositionKind::bi, words); }

VectorList compose_backward(CompositionKind kind, const VectorList& words,
                            std::span<const double> upstream) {
    check_strict_length(kind, words.size());
    const std::size_t dim = checked_dim(words);
    if (upstream.size() != dim) throw DimensionError("compose_backward: upstream dimension mismatch");
    std::vector<double> flat(words.size() * dim);
    backward(kind, words.size(), dim, [&](std::size_t i) { return words[i].data(); },
             upstream.data(), flat.data());
    VectorList out(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        out[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * dim),
                      flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    }
    return out;
}

void compose_into(CompositionKind kind, const EmbeddingTable& table, std::span<const WordId> ids,
                  std::span<double> out) {
    if (ids.empty()) throw CompositionError("cannot compose an empty word sequence");
    if (out.size() != table.dim()) throw DimensionError("compose_into: output dimension mismatch");
    forward(kind, ids.size(), table.dim(), [&](std::size_t i) { return table.row(ids[i]).data(); },
            out.data());
}

ComposedVector compose(CompositionKind kind, const EmbeddingTable& table,
                       std::span<const WordId> ids) {
    ComposedVector out{std::vector<double>(table.dim()), ids.size()};
    compose_into(kind, table, ids, out.values);
    return out;
}

void compose_backward(CompositionKind kind, const EmbeddingTable& table,
                      std::span<const WordId> ids, std::span<const double> upstream,
                      std::span<double> word_grads) {
    const std::size_t dim = table.dim();
    if (ids.empty()) throw CompositionError("cannot differentiate an empty word sequence");
    if (upstream.size() != dim || word_grads.size() != ids.size() * dim) {
        throw DimensionError("compose_backward: buffer dimension mismatch");
    }
    backward(kind, ids.size(), dim, [&](std::size_t i) { return table.row(ids[i]).data(); },
             upstream.data(), word_grads.data());
}

ComposedVector compose_document(std::span<const Sentence> document, const EmbeddingTable& table,
                                CompositionKind kind, bool strict) {
    if (document.empty()) throw CompositionError("cannot compose an empty document");
    if (strict && kind == CompositionKind::bi && document.size() < 2) {
        throw CompositionError("bi document composition needs at least two sentences");
    }
    const std::size_t dim = table.dim();
    std::vector<double> sentence_vectors(document.size() * dim);
    std::size_t tokens = 0;
    for (std::size_t s = 0; s < document.size(); ++s) {
        compose_into(kind, table, document[s],
                     std::span<double>(sentence_vectors).subspan(s * dim, dim));
        tokens += document[s].size();
    }
    ComposedVector out{std::vector<double>(dim), tokens};
    forward(kind, document.size(), dim,
            [&](std::size_t i) { return sentence_vectors.data() + i * dim; }, out.values.data());
    return out;
}

}  // namespace xlemb

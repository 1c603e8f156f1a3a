#include "xlemb/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"

namespace xlemb {

std::string_view to_string(Metric m) { return m == Metric::cosine ? "cosine" : "euclidean"; }

Metric parse_metric(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    throw UsageError("unknown metric '" + std::string(name) + "' (expected cosine or euclidean)");
}

std::vector<Neighbor> nearest_neighbors(std::string_view query, const Vocabulary& src_vocab,
                                        const EmbeddingTable& src, const Vocabulary& dst_vocab,
                                        const EmbeddingTable& dst, std::size_t k, Metric metric) {
    if (k < 1) throw UsageError("k must be >= 1");
    if (src.dim() != dst.dim()) throw DimensionError("nearest_neighbors: tables differ in dimension");
    if (src_vocab.size() != src.rows() || dst_vocab.size() != dst.rows()) {
        throw DimensionError("nearest_neighbors: vocabulary and table sizes differ");
    }
    const WordId qid = src_vocab.id(query);
    if (qid == kUnkId) {
        throw OovError("query '" + std::string(query) +
                       "' is not in the source vocabulary; tokens rarer than the UNK threshold "
                       "share the " + std::string(kUnkToken) + " vector and cannot be queried");
    }

    const Kernels& kern = kernels();
    const std::size_t dim = src.dim();
    const double* q = src.row(qid).data();
    const double q_norm = std::sqrt(kern.dot(q, q, dim));

    std::vector<Neighbor> scored;
    scored.reserve(dst.rows());
    for (std::size_t r = 1; r < dst.rows(); ++r) {
        const auto id = static_cast<WordId>(r);
        const double* v = dst.row(id).data();
        double score = 0.0;
        if (metric == Metric::cosine) {
            const double denom = q_norm * std::sqrt(kern.dot(v, v, dim));
            score = denom > 0.0 ? kern.dot(q, v, dim) / denom : 0.0;
        } else {
            score = -std::sqrt(kern.sq_dist(q, v, dim));
        }
        scored.push_back({dst_vocab.token(id), id, score});
    }
    const auto before = [](const Neighbor& a, const Neighbor& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.token < b.token;
    };
    const std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      before);
    scored.resize(keep);
    return scored;
}

}  // namespace xlemb

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xlemb/embedding_table.hpp"
#include "xlemb/vocabulary.hpp"

namespace xlemb {

enum class Metric { cosine, euclidean };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

struct Neighbor {
    std::string token;
    WordId id = 0;
    /// Cosine similarity, or negated euclidean distance.
    double score = 0.0;
};

/// Exhaustive scan of `dst` for the k highest-scoring rows relative to the
/// query's row in `src`. UNK is never returned. Results are ordered by
/// descending score, ties by token. Throws OovError for unknown queries.
std::vector<Neighbor> nearest_neighbors(std::string_view query, const Vocabulary& src_vocab,
                                        const EmbeddingTable& src, const Vocabulary& dst_vocab,
                                        const EmbeddingTable& dst, std::size_t k,
                                        Metric metric = Metric::cosine);

}  // namespace xlemb

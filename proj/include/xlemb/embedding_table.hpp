#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xlemb/vocabulary.hpp"

namespace xlemb {

/// Dense |V| x d row-major matrix of word vectors for one language.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t rows, std::size_t dim);

    std::size_t rows() const { return dim_ ? values_.size() / dim_ : 0; }
    std::size_t dim() const { return dim_; }

    std::span<double> row(WordId id) {
        return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    std::span<const double> row(WordId id) const {
        return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const;
    double squared_norm() const;

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

/// Entries i.i.d. Normal(0, sigma^2) from a generator seeded with `seed`.
EmbeddingTable init_table(std::size_t vocab_size, std::size_t dim, double sigma, std::uint64_t seed);

/// Text format: header `<rows> <dim>`, then `token f1 ... fd` per row in id
/// order. Values are written with enough digits to round-trip exactly.
void export_text(const std::filesystem::path& path, const EmbeddingTable& table,
                 std::span<const std::string> tokens);

struct LoadedEmbeddings {
    Vocabulary vocab;
    EmbeddingTable table;
};

/// Reads the text format. Row 0 is taken as UNK when its token is `<unk>`;
/// otherwise a zero UNK row is prepended so id 0 keeps its meaning.
LoadedEmbeddings import_text(const std::filesystem::path& path, std::string language_tag = {});

}  // namespace xlemb

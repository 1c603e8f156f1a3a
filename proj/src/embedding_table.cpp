#include "xlemb/embedding_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"
#include "xlemb/text.hpp"

namespace xlemb {

EmbeddingTable::EmbeddingTable(std::size_t rows, std::size_t dim)
    : dim_(dim), values_(rows * dim, 0.0) {}

bool EmbeddingTable::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double EmbeddingTable::squared_norm() const {
    return kernels().dot(values_.data(), values_.data(), values_.size());
}

EmbeddingTable init_table(std::size_t vocab_size, std::size_t dim, double sigma, std::uint64_t seed) {
    if (vocab_size < 1 || dim < 1) throw UsageError("init_table: vocab_size and dim must be >= 1");
    if (!(sigma > 0.0)) throw UsageError("init_table: sigma must be > 0");
    EmbeddingTable table(vocab_size, dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : table.values()) v = normal(rng);
    return table;
}

void export_text(const std::filesystem::path& path, const EmbeddingTable& table,
                 std::span<const std::string> tokens) {
    if (tokens.size() != table.rows()) {
        throw DimensionError("export: " + std::to_string(tokens.size()) + " tokens for " +
                             std::to_string(table.rows()) + " rows");
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << table.rows() << ' ' << table.dim() << '\n';
    char buf[32];
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << tokens[r];
        for (double v : table.row(static_cast<WordId>(r))) {
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            out << ' ';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
    if (!out) throw DataError("error writing " + path.string());
}

LoadedEmbeddings import_text(const std::filesystem::path& path, std::string language_tag) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
    const auto header = tokenize(line);
    std::size_t rows = 0;
    std::size_t dim = 0;
    try {
        if (header.size() != 2) throw std::invalid_argument("header");
        rows = std::stoull(header[0]);
        dim = std::stoull(header[1]);
    } catch (const std::exception&) {
        throw DataError(path.string() + ": header must be `<vocab_size> <dim>`");
    }
    if (dim == 0) throw DataError(path.string() + ": dim must be >= 1");

    std::vector<std::string> tokens;
    std::vector<double> values;
    tokens.reserve(rows + 1);
    values.reserve((rows + 1) * dim);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        const char* tok_end = p;
        while (tok_end < end && *tok_end != ' ') ++tok_end;
        tokens.emplace_back(p, tok_end);
        p = tok_end;
        for (std::size_t j = 0; j < dim; ++j) {
            while (p < end && *p == ' ') ++p;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(dim) + " values");
            }
            if (!std::isfinite(v)) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
            }
            values.push_back(v);
            p = next;
        }
        while (p < end && *p == ' ') ++p;
        if (p != end) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": trailing data");
        }
    }
    if (tokens.size() != rows) {
        throw DataError(path.string() + ": header announces " + std::to_string(rows) + " rows, found " +
                        std::to_string(tokens.size()));
    }
    if (tokens.empty() || tokens.front() != kUnkToken) {
        tokens.insert(tokens.begin(), std::string(kUnkToken));
        values.insert(values.begin(), dim, 0.0);
    }

    LoadedEmbeddings out{Vocabulary::from_tokens(std::move(tokens), {}, std::move(language_tag)),
                         EmbeddingTable(0, dim)};
    out.table = EmbeddingTable(out.vocab.size(), dim);
    out.table.values() = std::move(values);
    return out;
}

}  // namespace xlemb

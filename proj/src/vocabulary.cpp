#include "xlemb/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "xlemb/error.hpp"
#include "xlemb/text.hpp"

namespace xlemb {

Vocabulary::Vocabulary(std::string language_tag) : language_(std::move(language_tag)) {
    id_to_token_.emplace_back(kUnkToken);
    counts_.push_back(0);
    index();
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   std::uint64_t unk_threshold, std::string language_tag) {
    const std::uint64_t thresholds[] = {unk_threshold};
    return from_count_tables(std::span(&counts, 1), thresholds, std::move(language_tag));
}

Vocabulary Vocabulary::from_count_tables(
    std::span<const std::unordered_map<std::string, std::uint64_t>> tables,
    std::span<const std::uint64_t> thresholds, std::string language_tag) {
    if (tables.size() != thresholds.size()) {
        throw UsageError("vocabulary: one threshold per count table is required");
    }
    for (auto t : thresholds) {
        if (t < 1) throw UsageError("vocabulary: UNK threshold must be >= 1");
    }

    std::unordered_map<std::string, std::uint64_t> total;
    std::unordered_map<std::string, bool> keep;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (const auto& [tok, n] : tables[i]) {
            total[tok] += n;
            if (n >= thresholds[i]) keep[tok] = true;
            else keep.try_emplace(tok, false);
        }
    }

    std::uint64_t unk_count = 0;
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [tok, n] : total) {
        if (keep[tok] && tok != kUnkToken) kept.emplace_back(tok, n);
        else unk_count += n;
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (kept.size() + 1 > static_cast<std::size_t>(std::numeric_limits<WordId>::max())) {
        throw DataError("vocabulary: too many types");
    }

    Vocabulary v(std::move(language_tag));
    v.counts_[0] = unk_count;
    v.id_to_token_.reserve(kept.size() + 1);
    v.counts_.reserve(kept.size() + 1);
    for (auto& [tok, n] : kept) {
        v.id_to_token_.push_back(std::move(tok));
        v.counts_.push_back(n);
    }
    v.index();
    return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::vector<std::uint64_t> counts, std::string language_tag) {
    if (tokens.empty() || tokens.front() != kUnkToken) {
        throw DataError("vocabulary: entry 0 must be " + std::string(kUnkToken));
    }
    if (counts.empty()) counts.assign(tokens.size(), 0);
    if (counts.size() != tokens.size()) throw DataError("vocabulary: count/token size mismatch");
    Vocabulary v(std::move(language_tag));
    v.id_to_token_ = std::move(tokens);
    v.counts_ = std::move(counts);
    v.index();
    if (v.token_to_id_.size() != v.id_to_token_.size()) {
        throw DataError("vocabulary: duplicate token");
    }
    return v;
}

void Vocabulary::index() {
    token_to_id_.clear();
    token_to_id_.reserve(id_to_token_.size());
    for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
        token_to_id_.emplace(id_to_token_[i], static_cast<WordId>(i));
    }
}

WordId Vocabulary::id(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
    return token_to_id_.contains(std::string(token));
}

const std::string& Vocabulary::token(WordId id) const {
    return id_to_token_.at(static_cast<std::size_t>(id));
}

std::uint64_t Vocabulary::count(WordId id) const {
    return counts_.at(static_cast<std::size_t>(id));
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary file " + path.string());
    for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
        out << id_to_token_[i] << '\t' << counts_[i] << '\n';
    }
    if (!out) throw DataError("error writing vocabulary file " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::string language_tag) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file " + path.string());
    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected token<TAB>count");
        }
        tokens.push_back(line.substr(0, tab));
        try {
            counts.push_back(std::stoull(line.substr(tab + 1)));
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad count");
        }
    }
    return from_tokens(std::move(tokens), std::move(counts), std::move(language_tag));
}

std::unordered_map<std::string, std::uint64_t> count_tokens(std::span<const std::string> lines) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& line : lines) {
        for (auto& tok : tokenize(line)) ++counts[std::move(tok)];
    }
    return counts;
}

Vocabulary build_vocabulary(std::span<const std::string> lines, std::uint64_t unk_threshold,
                            std::string language_tag) {
    return Vocabulary::from_counts(count_tokens(lines), unk_threshold, std::move(language_tag));
}

}  // namespace xlemb

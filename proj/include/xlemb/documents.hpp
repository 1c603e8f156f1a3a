#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "xlemb/composition.hpp"
#include "xlemb/corpus.hpp"
#include "xlemb/embedding_table.hpp"

namespace xlemb {

/// Separator between sentences inside a document line (ASCII unit separator).
inline constexpr char kSentenceSeparator = '\x1f';

struct RawDocument {
    std::string label;
    std::string doc_id;
    std::vector<std::string> sentences;
};

struct LabeledDocument {
    std::string label;
    std::string doc_id;
    std::vector<Sentence> sentences;
};

/// Parses `label<TAB>doc_id<TAB>s1<US>s2...`. Empty sentences are dropped; a
/// document without any token is a DataError.
RawDocument parse_document_line(std::string_view line);
std::vector<RawDocument> read_documents(const std::filesystem::path& path);
std::string format_document_line(const RawDocument& doc);

std::vector<LabeledDocument> encode_documents(const std::vector<RawDocument>& docs,
                                              const Vocabulary& vocab, bool lowercase = false);

enum class NormMode { none, by_token_count, unit_l2 };

std::string_view to_string(NormMode mode);
NormMode parse_norm_mode(std::string_view name);

/// Two-level composition followed by the requested normalization. A
/// one-sentence document composes to zero under bi.
std::vector<double> represent_document(std::span<const Sentence> sentences,
                                       const EmbeddingTable& table, CompositionKind kind,
                                       NormMode norm = NormMode::none);

}  // namespace xlemb

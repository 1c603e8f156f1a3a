#include "xlemb/documents.hpp"

#include <cmath>
#include <fstream>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"
#include "xlemb/text.hpp"

namespace xlemb {

RawDocument parse_document_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
        throw DataError("document line must be label<TAB>doc_id<TAB>sentences");
    }
    RawDocument doc{std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)), {}};
    if (doc.label.empty()) throw DataError("document has an empty label");
    std::string_view body = line.substr(t2 + 1);
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto us = body.find(kSentenceSeparator, pos);
        const auto piece = body.substr(pos, us == std::string_view::npos ? body.size() - pos : us - pos);
        if (count_tokens_in(piece) > 0) doc.sentences.emplace_back(piece);
        if (us == std::string_view::npos) break;
        pos = us + 1;
    }
    if (doc.sentences.empty()) throw DataError("document '" + doc.doc_id + "' has no tokens");
    return doc;
}

std::vector<RawDocument> read_documents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open document file " + path.string());
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            docs.push_back(parse_document_line(line));
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return docs;
}

std::string format_document_line(const RawDocument& doc) {
    std::string out = doc.label + '\t' + doc.doc_id + '\t';
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        if (i) out.push_back(kSentenceSeparator);
        out += doc.sentences[i];
    }
    return out;
}

std::vector<LabeledDocument> encode_documents(const std::vector<RawDocument>& docs,
                                              const Vocabulary& vocab, bool lowercase) {
    std::vector<LabeledDocument> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        LabeledDocument ld{d.label, d.doc_id, {}};
        ld.sentences.reserve(d.sentences.size());
        for (const auto& s : d.sentences) ld.sentences.push_back(encode(s, vocab, lowercase));
        out.push_back(std::move(ld));
    }
    return out;
}

std::string_view to_string(NormMode mode) {
    switch (mode) {
        case NormMode::none: return "none";
        case NormMode::by_token_count: return "by_token_count";
        case NormMode::unit_l2: return "unit_l2";
    }
    return "none";
}

NormMode parse_norm_mode(std::string_view name) {
    if (name == "none") return NormMode::none;
    if (name == "by_token_count") return NormMode::by_token_count;
    if (name == "unit_l2") return NormMode::unit_l2;
    throw UsageError("unknown normalization '" + std::string(name) +
                     "' (expected none, by_token_count or unit_l2)");
}

std::vector<double> represent_document(std::span<const Sentence> sentences,
                                       const EmbeddingTable& table, CompositionKind kind,
                                       NormMode norm) {
    ComposedVector v = compose_document(sentences, table, kind, /*strict=*/false);
    const Kernels& k = kernels();
    switch (norm) {
        case NormMode::none:
            break;
        case NormMode::by_token_count:
            k.scale(v.values.data(), 1.0 / static_cast<double>(v.source_len), v.dim());
            break;
        case NormMode::unit_l2: {
            const double n = std::sqrt(k.dot(v.values.data(), v.values.data(), v.dim()));
            if (n > 0.0) k.scale(v.values.data(), 1.0 / n, v.dim());
            break;
        }
    }
    return std::move(v.values);
}

}  // namespace xlemb

#include "xlemb/corpus.hpp"

#include <charconv>
#include <fstream>

#include "xlemb/error.hpp"
#include "xlemb/text.hpp"

namespace xlemb {

Sentence encode(std::string_view sentence, const Vocabulary& vocab, bool lowercase) {
    const auto tokens = lowercase ? tokenize(to_lower(sentence)) : tokenize(sentence);
    Sentence out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) out.push_back(vocab.id(tok));
    return out;
}

std::string decode(std::span<const WordId> sentence, const Vocabulary& vocab) {
    std::string out;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (i) out.push_back(' ');
        out += vocab.token(sentence[i]);
    }
    return out;
}

MonoCorpus::MonoCorpus(Side side, std::vector<Sentence> sentences)
    : side_(side), sentences_(std::move(sentences)) {
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
        if (sentences_[i].size() >= kMinPhraseLength) eligible_.push_back(static_cast<std::uint32_t>(i));
    }
}

std::uint64_t MonoCorpus::token_count() const {
    std::uint64_t n = 0;
    for (const auto& s : sentences_) n += s.size();
    return n;
}

ParallelCorpus::ParallelCorpus(std::vector<Sentence> l1, std::vector<Sentence> l2)
    : l1_(std::move(l1)), l2_(std::move(l2)) {
    if (l1_.size() != l2_.size()) {
        throw AlignmentError("parallel corpus sides differ in length: " + std::to_string(l1_.size()) +
                             " vs " + std::to_string(l2_.size()));
    }
}

void ParallelCorpus::truncate(std::size_t n) {
    if (n < l1_.size()) {
        l1_.resize(n);
        l2_.resize(n);
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

void write_lines(const std::filesystem::path& path, std::span<const std::string> lines) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw DataError("error writing " + path.string());
}

void save_encoded(const std::filesystem::path& path, std::span<const Sentence> sentences) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out << ' ';
            out << s[i];
        }
        out << '\n';
    }
    if (!out) throw DataError("error writing " + path.string());
}

std::vector<Sentence> load_encoded(const std::filesystem::path& path, std::size_t vocab_size) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<Sentence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        Sentence s;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p == end) break;
            WordId id = 0;
            auto [next, ec] = std::from_chars(p, end, id);
            if (ec != std::errc{} || id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": bad or out-of-range word id");
            }
            s.push_back(id);
            p = next;
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace xlemb

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xlemb/composition.hpp"
#include "xlemb/documents.hpp"
#include "xlemb/embedding_table.hpp"
#include "xlemb/perceptron.hpp"

namespace xlemb {

struct EvalConfig {
    CompositionKind composition = CompositionKind::add;
    NormMode norm = NormMode::none;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    /// Seeded subsample of the training documents; unset uses all of them.
    std::optional<std::size_t> train_size;
};

struct EvalReport {
    std::string direction;
    double accuracy = 0.0;
    std::vector<std::string> classes;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::string config_echo;

    /// Human-readable summary followed by a `key=value` block.
    std::string to_text() const;
};

/// Seeded subsample of n items (all when n >= size), original order kept.
std::vector<std::size_t> subsample_indices(std::size_t size, std::size_t n, std::uint64_t seed);

/// Composes each document with its own language's table, trains the
/// averaged perceptron on the training documents and tests on the others.
/// Throws LabelError when a test label does not occur in training.
EvalReport crosslingual_eval(const std::vector<LabeledDocument>& train_docs,
                             const EmbeddingTable& train_table,
                             const std::vector<LabeledDocument>& test_docs,
                             const EmbeddingTable& test_table, const EvalConfig& config,
                             std::string direction = "l1->l2");

}  // namespace xlemb

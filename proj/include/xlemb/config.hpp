#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlemb/composition.hpp"

namespace xlemb {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped. Throws UsageError on lines without '='.
std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin = "config");
std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path);

/// Fraction of each mini-batch drawn from (bilingual, mono l1, mono l2).
struct MixFractions {
    double bilingual = 1.0;
    double mono_l1 = 0.0;
    double mono_l2 = 0.0;

    friend bool operator==(const MixFractions&, const MixFractions&) = default;
};

struct TrainConfig {
    std::size_t dim = 40;
    double learning_rate = 0.2;
    std::size_t batch_size = 40000;
    /// Hinge margin; unset means "equal to dim".
    std::optional<double> margin;
    double lambda = 1.0;
    std::size_t epochs_bi_only = 100;
    std::size_t epochs_with_mono = 25;
    /// Overrides the two defaults above when set.
    std::optional<std::size_t> epochs;
    /// Unset means proportional to corpus sizes.
    std::optional<MixFractions> mix;
    std::uint64_t seed = 1;
    double adagrad_epsilon = 1e-8;
    double init_sigma = 0.1;
    CompositionKind composition = CompositionKind::add;
    std::size_t threads = 1;

    double effective_margin() const { return margin ? *margin : static_cast<double>(dim); }

    /// Sets a field from its config-file key. Returns false for unknown keys;
    /// throws UsageError for malformed values.
    bool set(std::string_view key, std::string_view value);
    /// Throws UsageError when an invariant does not hold.
    void validate() const;
    /// `key = value` lines accepted by set().
    std::string to_text() const;
    static TrainConfig from_text(std::string_view text);

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

std::string format_mix(const MixFractions& mix);
MixFractions parse_mix(std::string_view text);

}  // namespace xlemb

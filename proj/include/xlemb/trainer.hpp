#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "xlemb/config.hpp"
#include "xlemb/corpus.hpp"
#include "xlemb/objective.hpp"
#include "xlemb/sampling.hpp"

namespace xlemb {

/// Accumulated squared gradients, same shapes as the parameters.
struct AdaGradState {
    EmbeddingTable l1;
    EmbeddingTable l2;

    static AdaGradState zeros_like(const Parameters& params);
    EmbeddingTable& table(Side s) { return s == Side::l1 ? l1 : l2; }

    friend bool operator==(const AdaGradState&, const AdaGradState&) = default;
};

/// Per coordinate: acc += g^2; w -= lr * g / (sqrt(acc) + eps).
/// Throws NumericError on a non-finite gradient.
void adagrad_update(std::span<double> row, std::span<const double> grad, std::span<double> acc,
                    double lr, double eps);

/// Corpora visible to the trainer. Null entries are absent corpora.
struct TrainingData {
    const ParallelCorpus* bilingual = nullptr;
    const MonoCorpus* mono_l1 = nullptr;
    const MonoCorpus* mono_l2 = nullptr;

    const MonoCorpus* mono(Side s) const { return s == Side::l1 ? mono_l1 : mono_l2; }
    bool has_mono() const;
    /// Size of the largest configured corpus.
    std::size_t largest_corpus() const;
};

/// Mix used for a run: the configured one, or proportional to corpus sizes.
MixFractions resolve_mix(const TrainingData& data, const TrainConfig& config);

/// Draws round(batch_size * f) samples from each source, in the order
/// bilingual, mono l1, mono l2. Throws UsageError when mix mass falls on an
/// absent corpus.
Batch make_batch(const TrainingData& data, const MixFractions& mix, std::size_t batch_size, Rng& rng);

/// One optimization step: gradient of the batch objective, then AdaGrad on
/// the touched rows only. `scratch` holds the step's gradient afterwards.
LossBreakdown train_step(const Batch& batch, Parameters& params, AdaGradState& state,
                         const TrainConfig& config, GradientAccumulator& scratch);

/// Number of epochs the run will perform.
std::size_t resolve_epochs(const TrainingData& data, const TrainConfig& config);
/// ceil(largest corpus / batch size), at least 1.
std::size_t steps_per_epoch(const TrainingData& data, const TrainConfig& config);

struct Checkpoint {
    Parameters params;
    AdaGradState state;
    TrainConfig config;
    std::uint64_t epoch = 0;
    std::string rng_state;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// `epoch batch L_bi L_mono1 L_mono2 L_reg L_total`
std::string format_log_line(std::size_t epoch, std::size_t batch, const LossBreakdown& loss);

/// Stateful training loop over a fixed data set.
class Trainer {
public:
    /// Fresh run: tables initialized from config.seed.
    Trainer(const TrainingData& data, TrainConfig config, std::size_t vocab_l1, std::size_t vocab_l2);
    /// Continues from a checkpoint; the configuration comes from the checkpoint.
    Trainer(const TrainingData& data, Checkpoint ckpt);

    using LogFn = std::function<void(std::size_t epoch, std::size_t batch, const LossBreakdown&)>;

    /// Runs one epoch and returns the mean per-batch loss.
    LossBreakdown run_epoch(const LogFn& log = {});
    LossBreakdown step();

    std::size_t epoch() const { return epoch_; }
    std::size_t total_epochs() const { return total_epochs_; }
    bool done() const { return epoch_ >= total_epochs_; }
    std::size_t steps_per_epoch() const { return steps_per_epoch_; }
    const MixFractions& mix() const { return mix_; }
    const TrainConfig& config() const { return config_; }
    const Parameters& params() const { return params_; }
    const AdaGradState& state() const { return state_; }
    /// Gradient of the most recent step.
    const GradientAccumulator& last_gradient() const { return scratch_; }

    Checkpoint checkpoint() const;

private:
    void check_data(std::size_t vocab_l1, std::size_t vocab_l2) const;

    TrainingData data_;
    TrainConfig config_;
    Parameters params_;
    AdaGradState state_;
    Rng rng_;
    MixFractions mix_;
    std::size_t epoch_ = 0;
    std::size_t batch_in_epoch_ = 0;
    std::size_t total_epochs_ = 0;
    std::size_t steps_per_epoch_ = 1;
    GradientAccumulator scratch_;
};

struct TrainOptions {
    std::ostream* log = nullptr;
    std::filesystem::path checkpoint_path;
    /// Write a checkpoint every n epochs (0: only at the end).
    std::size_t checkpoint_every = 0;
    std::function<void(const Trainer&, const LossBreakdown& epoch_mean)> on_epoch;
};

/// Runs all epochs and returns the trained parameters. On a numeric failure
/// the last good state is flushed to the checkpoint path before rethrowing.
Parameters train(const TrainingData& data, const TrainConfig& config, std::size_t vocab_l1,
                 std::size_t vocab_l2, const TrainOptions& options = {});

}  // namespace xlemb

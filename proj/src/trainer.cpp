#include "xlemb/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"

namespace xlemb {

AdaGradState AdaGradState::zeros_like(const Parameters& params) {
    return {EmbeddingTable(params.l1.rows(), params.l1.dim()),
            EmbeddingTable(params.l2.rows(), params.l2.dim())};
}

void adagrad_update(std::span<double> row, std::span<const double> grad, std::span<double> acc,
                    double lr, double eps) {
    if (row.size() != grad.size() || row.size() != acc.size()) {
        throw DimensionError("adagrad_update: shape mismatch");
    }
    if (!(eps > 0.0)) throw UsageError("adagrad_update: eps must be > 0");
    for (double g : grad) {
        if (!std::isfinite(g)) throw NumericError("non-finite gradient encountered");
    }
    kernels().adagrad(row.data(), grad.data(), acc.data(), lr, eps, row.size());
}

bool TrainingData::has_mono() const {
    return (mono_l1 && !mono_l1->empty()) || (mono_l2 && !mono_l2->empty());
}

std::size_t TrainingData::largest_corpus() const {
    std::size_t n = 0;
    if (bilingual) n = std::max(n, bilingual->size());
    if (mono_l1) n = std::max(n, mono_l1->size());
    if (mono_l2) n = std::max(n, mono_l2->size());
    return n;
}

MixFractions resolve_mix(const TrainingData& data, const TrainConfig& config) {
    if (config.mix) return *config.mix;
    const double b = data.bilingual ? static_cast<double>(data.bilingual->size()) : 0.0;
    const double m1 = data.mono_l1 ? static_cast<double>(data.mono_l1->size()) : 0.0;
    const double m2 = data.mono_l2 ? static_cast<double>(data.mono_l2->size()) : 0.0;
    const double total = b + m1 + m2;
    if (total == 0.0) throw UsageError("no training corpus configured");
    return {b / total, m1 / total, m2 / total};
}

Batch make_batch(const TrainingData& data, const MixFractions& mix, std::size_t batch_size, Rng& rng) {
    const auto count = [&](double f) {
        return static_cast<std::size_t>(std::llround(static_cast<double>(batch_size) * f));
    };
    const std::size_t n_bi = count(mix.bilingual);
    const std::size_t n_m1 = count(mix.mono_l1);
    const std::size_t n_m2 = count(mix.mono_l2);
    if (n_bi + n_m1 + n_m2 == 0 && batch_size > 0) {
        throw UsageError("mix fractions select no samples");
    }
    if (n_bi > 0 && (!data.bilingual || data.bilingual->empty())) {
        throw UsageError("mix puts mass on the bilingual corpus, which is absent");
    }
    if (n_m1 > 0 && (!data.mono_l1 || data.mono_l1->eligible().empty())) {
        throw UsageError("mix puts mass on the l1 monolingual corpus, which is absent");
    }
    if (n_m2 > 0 && (!data.mono_l2 || data.mono_l2->eligible().empty())) {
        throw UsageError("mix puts mass on the l2 monolingual corpus, which is absent");
    }

    Batch batch;
    batch.bilingual.reserve(n_bi);
    for (std::size_t i = 0; i < n_bi; ++i) {
        const std::size_t k = sample_bilingual_pair(*data.bilingual, rng);
        batch.bilingual.push_back({data.bilingual->l1(k), data.bilingual->l2(k)});
    }
    for (Side side : {Side::l1, Side::l2}) {
        const std::size_t n = side == Side::l1 ? n_m1 : n_m2;
        if (n == 0) continue;
        const MonoCorpus& corpus = *data.mono(side);
        auto& out = batch.mono(side);
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const PhraseTriple t = sample_phrase_triple(corpus, rng);
            out.push_back({span_tokens(corpus, t.outer), span_tokens(corpus, t.inner),
                           span_tokens(corpus, t.noise)});
        }
    }
    return batch;
}

namespace {

template <class T>
std::vector<T> shard(const std::vector<T>& v, std::size_t k, std::size_t n) {
    const std::size_t lo = v.size() * k / n;
    const std::size_t hi = v.size() * (k + 1) / n;
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(lo),
                          v.begin() + static_cast<std::ptrdiff_t>(hi));
}

LossBreakdown parallel_data_loss(const Batch& batch, const Parameters& params,
                                 const TrainConfig& config, GradientAccumulator& acc) {
    const std::size_t n = config.threads;
    std::vector<Batch> shards(n);
    for (std::size_t k = 0; k < n; ++k) {
        shards[k].bilingual = shard(batch.bilingual, k, n);
        shards[k].mono_l1 = shard(batch.mono_l1, k, n);
        shards[k].mono_l2 = shard(batch.mono_l2, k, n);
    }
    std::vector<GradientAccumulator> partial(n, GradientAccumulator(params.dim()));
    std::vector<LossBreakdown> losses(n);
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> workers;
    workers.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        workers.emplace_back([&, k] {
            try {
                losses[k] = data_loss_and_grad(shards[k], params, config.composition,
                                               config.effective_margin(), partial[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    LossBreakdown total;
    for (std::size_t k = 0; k < n; ++k) {
        total += losses[k];
        acc.merge(partial[k]);
    }
    return total;
}

}  // namespace

LossBreakdown train_step(const Batch& batch, Parameters& params, AdaGradState& state,
                         const TrainConfig& config, GradientAccumulator& scratch) {
    scratch = GradientAccumulator(params.dim());
    LossBreakdown loss = config.threads > 1
                             ? parallel_data_loss(batch, params, config, scratch)
                             : data_loss_and_grad(batch, params, config.composition,
                                                  config.effective_margin(), scratch);
    loss.regularizer = apply_regularizer(params, config.lambda, scratch);
    loss.finalize();
    if (!std::isfinite(loss.total) || !scratch.all_finite()) {
        throw NumericError("non-finite loss or gradient in training step");
    }

    for (Side side : {Side::l1, Side::l2}) {
        EmbeddingTable& table = params.table(side);
        EmbeddingTable& acc = state.table(side);
        const auto& ids = scratch.touched(side);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            adagrad_update(table.row(ids[k]), scratch.row_at(side, k), acc.row(ids[k]),
                           config.learning_rate, config.adagrad_epsilon);
        }
    }
    return loss;
}

std::size_t resolve_epochs(const TrainingData& data, const TrainConfig& config) {
    if (config.epochs) return *config.epochs;
    return data.has_mono() ? config.epochs_with_mono : config.epochs_bi_only;
}

std::size_t steps_per_epoch(const TrainingData& data, const TrainConfig& config) {
    const std::size_t n = data.largest_corpus();
    return std::max<std::size_t>(1, (n + config.batch_size - 1) / config.batch_size);
}

std::string format_log_line(std::size_t epoch, std::size_t batch, const LossBreakdown& l) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu %zu %.10g %.10g %.10g %.10g %.10g", epoch, batch, l.bilingual,
                  l.mono_l1, l.mono_l2, l.regularizer, l.total);
    return buf;
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const TrainingData& data, TrainConfig config, std::size_t vocab_l1,
                 std::size_t vocab_l2)
    : data_(data), config_(std::move(config)), rng_(config_.seed), scratch_(config_.dim) {
    config_.validate();
    check_data(vocab_l1, vocab_l2);
    // Each table gets its own stream derived from the run seed.
    params_.l1 = init_table(vocab_l1, config_.dim, config_.init_sigma, config_.seed * 2 + 1);
    params_.l2 = init_table(vocab_l2, config_.dim, config_.init_sigma, config_.seed * 2 + 2);
    state_ = AdaGradState::zeros_like(params_);
    mix_ = resolve_mix(data_, config_);
    total_epochs_ = resolve_epochs(data_, config_);
    steps_per_epoch_ = xlemb::steps_per_epoch(data_, config_);
}

Trainer::Trainer(const TrainingData& data, Checkpoint ckpt)
    : data_(data),
      config_(std::move(ckpt.config)),
      params_(std::move(ckpt.params)),
      state_(std::move(ckpt.state)),
      epoch_(ckpt.epoch),
      scratch_(config_.dim) {
    config_.validate();
    if (params_.dim() != config_.dim || params_.l2.dim() != config_.dim) {
        throw DataError("checkpoint tables do not match the configured dimension");
    }
    check_data(params_.l1.rows(), params_.l2.rows());
    std::istringstream in(ckpt.rng_state);
    in >> rng_;
    if (!in) throw DataError("checkpoint rng state is corrupt");
    mix_ = resolve_mix(data_, config_);
    total_epochs_ = resolve_epochs(data_, config_);
    steps_per_epoch_ = xlemb::steps_per_epoch(data_, config_);
}

void Trainer::check_data(std::size_t vocab_l1, std::size_t vocab_l2) const {
    const auto check = [](const std::vector<Sentence>& sentences, std::size_t vocab, const char* what) {
        for (const auto& s : sentences) {
            for (WordId id : s) {
                if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
                    throw DataError(std::string(what) + " corpus references an id outside the vocabulary");
                }
            }
        }
    };
    if (data_.bilingual) {
        check(data_.bilingual->side(Side::l1), vocab_l1, "bilingual l1");
        check(data_.bilingual->side(Side::l2), vocab_l2, "bilingual l2");
    }
    if (data_.mono_l1) check(data_.mono_l1->sentences(), vocab_l1, "monolingual l1");
    if (data_.mono_l2) check(data_.mono_l2->sentences(), vocab_l2, "monolingual l2");
}

LossBreakdown Trainer::step() {
    const Batch batch = make_batch(data_, mix_, config_.batch_size, rng_);
    return train_step(batch, params_, state_, config_, scratch_);
}

LossBreakdown Trainer::run_epoch(const LogFn& log) {
    LossBreakdown sum;
    for (std::size_t b = 0; b < steps_per_epoch_; ++b) {
        const LossBreakdown loss = step();
        if (log) log(epoch_, b, loss);
        sum += loss;
    }
    const double n = static_cast<double>(steps_per_epoch_);
    LossBreakdown mean{sum.bilingual / n, sum.mono_l1 / n, sum.mono_l2 / n, sum.regularizer / n, 0.0};
    mean.finalize();
    ++epoch_;
    return mean;
}

Checkpoint Trainer::checkpoint() const {
    std::ostringstream rng_text;
    rng_text << rng_;
    return {params_, state_, config_, epoch_, rng_text.str()};
}

// ---------------------------------------------------------------------------
// Checkpoint archive
//
// magic[8] "XLEMBCKP", u32 version, u32 byte-order mark, then length-prefixed
// config text and rng text, u64 rng digest, u64 epoch, and four tables
// (params l1, params l2, adagrad l1, adagrad l2) as u64 rows, u64 dim, raw
// doubles.

namespace {

constexpr char kMagic[8] = {'X', 'L', 'E', 'M', 'B', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kByteOrder = 0x01020304;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("checkpoint is truncated");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    if (n > (1ull << 30)) throw DataError("checkpoint string field is implausibly large");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw DataError("checkpoint is truncated");
    return s;
}

void put_table(std::ostream& out, const EmbeddingTable& t) {
    put<std::uint64_t>(out, t.rows());
    put<std::uint64_t>(out, t.dim());
    out.write(reinterpret_cast<const char*>(t.values().data()),
              static_cast<std::streamsize>(t.values().size() * sizeof(double)));
}

EmbeddingTable get_table(std::istream& in) {
    const auto rows = get<std::uint64_t>(in);
    const auto dim = get<std::uint64_t>(in);
    if (dim == 0 || rows > (1ull << 40) / dim) throw DataError("checkpoint table has a bad shape");
    EmbeddingTable t(rows, dim);
    in.read(reinterpret_cast<char*>(t.values().data()),
            static_cast<std::streamsize>(t.values().size() * sizeof(double)));
    if (!in) throw DataError("checkpoint is truncated");
    return t;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write checkpoint " + tmp.string());
        out.write(kMagic, sizeof kMagic);
        put(out, kVersion);
        put(out, kByteOrder);
        put_string(out, ckpt.config.to_text());
        put_string(out, ckpt.rng_state);
        put<std::uint64_t>(out, fnv1a(ckpt.rng_state));
        put<std::uint64_t>(out, ckpt.epoch);
        put_table(out, ckpt.params.l1);
        put_table(out, ckpt.params.l2);
        put_table(out, ckpt.state.l1);
        put_table(out, ckpt.state.l2);
        if (!out) throw DataError("error writing checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw DataError(path.string() + " is not a checkpoint");
    }
    if (get<std::uint32_t>(in) != kVersion) throw DataError("unsupported checkpoint version");
    if (get<std::uint32_t>(in) != kByteOrder) throw DataError("checkpoint byte order differs from this machine");
    Checkpoint c;
    c.config = TrainConfig::from_text(get_string(in));
    c.rng_state = get_string(in);
    if (get<std::uint64_t>(in) != fnv1a(c.rng_state)) throw DataError("checkpoint rng digest mismatch");
    c.epoch = get<std::uint64_t>(in);
    c.params.l1 = get_table(in);
    c.params.l2 = get_table(in);
    c.state.l1 = get_table(in);
    c.state.l2 = get_table(in);
    return c;
}

Parameters train(const TrainingData& data, const TrainConfig& config, std::size_t vocab_l1,
                 std::size_t vocab_l2, const TrainOptions& options) {
    Trainer trainer(data, config, vocab_l1, vocab_l2);
    const auto log = [&](std::size_t epoch, std::size_t batch, const LossBreakdown& loss) {
        if (options.log) *options.log << format_log_line(epoch, batch, loss) << '\n';
    };
    const bool checkpointing = !options.checkpoint_path.empty();
    while (!trainer.done()) {
        LossBreakdown mean;
        try {
            mean = trainer.run_epoch(log);
        } catch (const NumericError&) {
            if (checkpointing) save_checkpoint(options.checkpoint_path, trainer.checkpoint());
            throw;
        }
        if (options.on_epoch) options.on_epoch(trainer, mean);
        if (checkpointing && options.checkpoint_every > 0 &&
            trainer.epoch() % options.checkpoint_every == 0) {
            save_checkpoint(options.checkpoint_path, trainer.checkpoint());
        }
    }
    if (checkpointing) save_checkpoint(options.checkpoint_path, trainer.checkpoint());
    if (!trainer.params().l1.all_finite() || !trainer.params().l2.all_finite()) {
        throw NumericError("parameters became non-finite during training");
    }
    return trainer.params();
}

}  // namespace xlemb

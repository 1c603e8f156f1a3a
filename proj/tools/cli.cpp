#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "xlemb/composition.hpp"
#include "xlemb/config.hpp"
#include "xlemb/corpus.hpp"
#include "xlemb/documents.hpp"
#include "xlemb/embedding_table.hpp"
#include "xlemb/error.hpp"
#include "xlemb/evaluation.hpp"
#include "xlemb/kernels.hpp"
#include "xlemb/neighbors.hpp"
#include "xlemb/text.hpp"
#include "xlemb/trainer.hpp"
#include "xlemb/vocabulary.hpp"

namespace fs = std::filesystem;

namespace xlemb::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 1;

// Preprocessed data directory layout.
constexpr const char* kVocabL1 = "vocab.l1.tsv";
constexpr const char* kVocabL2 = "vocab.l2.tsv";
constexpr const char* kBiL1 = "bi.l1.ids";
constexpr const char* kBiL2 = "bi.l2.ids";
constexpr const char* kMonoL1 = "mono.l1.ids";
constexpr const char* kMonoL2 = "mono.l2.ids";

// Outputs are written under temporary names and renamed together once every
// file has been produced, so a failed command leaves nothing behind.
class OutputSet {
public:
    fs::path add(const fs::path& final_path) {
        fs::path tmp = final_path;
        tmp += ".partial";
        files_.emplace_back(tmp, final_path);
        return tmp;
    }
    void commit() {
        for (const auto& [tmp, dst] : files_) fs::rename(tmp, dst);
        files_.clear();
    }
    ~OutputSet() {
        std::error_code ec;
        for (const auto& [tmp, dst] : files_) fs::remove(tmp, ec);
    }

private:
    std::vector<std::pair<fs::path, fs::path>> files_;
};

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw UsageError(what + " not found: " + p.string());
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

// ---------------------------------------------------------------------------
// Config keys

struct PreprocessSettings {
    std::uint64_t unk_bi_l1 = 2;
    std::uint64_t unk_bi_l2 = 2;
    std::uint64_t unk_mono_l1 = 5;
    std::uint64_t unk_mono_l2 = 3;
    double cutoff_l1 = 0.9;
    double cutoff_l2 = 0.7;
    std::size_t min_bilingual_len = 1;

    std::vector<std::pair<std::string, std::string>> defaults() const {
        auto d = [](double v) {
            std::ostringstream s;
            s << v;
            return s.str();
        };
        return {{"unk_bi_l1", std::to_string(unk_bi_l1)},     {"unk_bi_l2", std::to_string(unk_bi_l2)},
                {"unk_mono_l1", std::to_string(unk_mono_l1)}, {"unk_mono_l2", std::to_string(unk_mono_l2)},
                {"cutoff_l1", d(cutoff_l1)},                  {"cutoff_l2", d(cutoff_l2)},
                {"min_bilingual_len", std::to_string(min_bilingual_len)}};
    }

    bool set(const std::string& key, const std::string& value) {
        try {
            if (key == "unk_bi_l1") unk_bi_l1 = std::stoull(value);
            else if (key == "unk_bi_l2") unk_bi_l2 = std::stoull(value);
            else if (key == "unk_mono_l1") unk_mono_l1 = std::stoull(value);
            else if (key == "unk_mono_l2") unk_mono_l2 = std::stoull(value);
            else if (key == "cutoff_l1") cutoff_l1 = std::stod(value);
            else if (key == "cutoff_l2") cutoff_l2 = std::stod(value);
            else if (key == "min_bilingual_len") min_bilingual_len = std::stoull(value);
            else return false;
        } catch (const std::logic_error&) {
            throw UsageError("invalid value '" + value + "' for " + key);
        }
        return true;
    }

    void validate() const {
        for (auto t : {unk_bi_l1, unk_bi_l2, unk_mono_l1, unk_mono_l2}) {
            if (t < 1) throw UsageError("UNK thresholds must be >= 1");
        }
        for (double c : {cutoff_l1, cutoff_l2}) {
            if (!(c >= 0.0 && c <= 1.0)) throw UsageError("lowercase cutoffs must lie in [0, 1]");
        }
    }
};

struct RunSettings {
    std::size_t bilingual_limit = 0;
    bool use_mono = true;
    bool mono_from_bilingual = false;
    std::optional<std::size_t> eval_train_size;
    std::size_t eval_epochs = 10;

    bool set(const std::string& key, const std::string& value) {
        const auto boolean = [&](const std::string& v) {
            if (v == "true" || v == "1" || v == "yes") return true;
            if (v == "false" || v == "0" || v == "no") return false;
            throw UsageError("invalid boolean '" + v + "' for " + key);
        };
        try {
            if (key == "bilingual_limit") bilingual_limit = std::stoull(value);
            else if (key == "use_mono") use_mono = boolean(value);
            else if (key == "mono_from_bilingual") mono_from_bilingual = boolean(value);
            else if (key == "eval_train_size") eval_train_size = std::stoull(value);
            else if (key == "eval_epochs") eval_epochs = std::stoull(value);
            else return false;
        } catch (const std::logic_error&) {
            throw UsageError("invalid value '" + value + "' for " + key);
        }
        return true;
    }
};

// A config file may hold keys for any command; each command applies the keys
// it understands. Keys no command understands are errors.
template <class Apply>
void apply_config_file(const std::string& path, Apply apply) {
    if (path.empty()) return;
    for (const auto& kv : read_key_value_file(path)) {
        TrainConfig tc;
        PreprocessSettings ps;
        RunSettings rs;
        const bool known = tc.set(kv.key, kv.value) || ps.set(kv.key, kv.value) || rs.set(kv.key, kv.value);
        if (!known) {
            throw UsageError(path + ":" + std::to_string(kv.line) + ": unknown config key '" + kv.key + "'");
        }
        apply(kv.key, kv.value);
    }
}

std::vector<std::pair<std::string, std::string>> train_defaults() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& kv : parse_key_values(TrainConfig{}.to_text())) {
        if (kv.key == "seed") continue;  // handled by the shared --seed flag
        out.emplace_back(kv.key, kv.value);
    }
    return out;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
    std::string bi_l1, bi_l2, mono_l1, mono_l2, out_dir, config;
    bool lowercase = false;
    std::map<std::string, std::string> overrides;
};

struct CorpusStats {
    std::string name;
    std::string type;
    std::uint64_t threshold = 0;
    std::size_t input_sentences = 0;
    std::size_t sentences = 0;
    std::uint64_t tokens = 0;
    std::size_t types = 0;
};

CorpusStats stats_for(std::string name, std::string type, std::uint64_t threshold,
                      std::size_t input_sentences, const std::vector<Sentence>& encoded) {
    CorpusStats s{std::move(name), std::move(type), threshold, input_sentences, encoded.size(), 0, 0};
    std::set<WordId> ids;
    for (const auto& sent : encoded) {
        s.tokens += sent.size();
        ids.insert(sent.begin(), sent.end());
    }
    s.types = ids.size();
    return s;
}

int run_preprocess(const PreprocessArgs& a, CLI::App& cmd, std::ostream& out, std::ostream& err) {
    PreprocessSettings settings;
    apply_config_file(a.config, [&](const std::string& k, const std::string& v) { settings.set(k, v); });
    for (const auto& [key, value] : a.overrides) {
        if (cmd.get_option("--" + dashed(key))->count() > 0) settings.set(key, value);
    }
    settings.validate();

    const bool have_bi = !a.bi_l1.empty() || !a.bi_l2.empty();
    if (have_bi && (a.bi_l1.empty() || a.bi_l2.empty())) {
        throw UsageError("--bi-l1 and --bi-l2 must be given together");
    }
    if (!have_bi && a.mono_l1.empty() && a.mono_l2.empty()) {
        throw UsageError("no input corpus given");
    }
    if (have_bi) {
        require_file(a.bi_l1, "bilingual l1 file");
        require_file(a.bi_l2, "bilingual l2 file");
    }
    if (!a.mono_l1.empty()) require_file(a.mono_l1, "monolingual l1 file");
    if (!a.mono_l2.empty()) require_file(a.mono_l2, "monolingual l2 file");
    if (a.out_dir.empty()) throw UsageError("--out-dir is required");

    std::vector<RawPair> pairs;
    std::size_t input_pairs = 0;
    if (have_bi) {
        pairs = zip_aligned(read_lines(a.bi_l1), read_lines(a.bi_l2));
        input_pairs = pairs.size();
        pairs = filter_parallel(pairs, settings.cutoff_l1, settings.cutoff_l2, settings.min_bilingual_len);
    }
    std::vector<std::string> mono[2];
    std::size_t input_mono[2] = {0, 0};
    const std::string* mono_paths[2] = {&a.mono_l1, &a.mono_l2};
    const double cutoffs[2] = {settings.cutoff_l1, settings.cutoff_l2};
    for (int s = 0; s < 2; ++s) {
        if (mono_paths[s]->empty()) continue;
        auto lines = read_lines(*mono_paths[s]);
        input_mono[s] = lines.size();
        mono[s] = filter_monolingual(lines, cutoffs[s], 1);
    }
    if (a.lowercase) {
        for (auto& p : pairs) {
            p.l1 = to_lower(p.l1);
            p.l2 = to_lower(p.l2);
        }
        for (auto& m : mono) {
            for (auto& line : m) line = to_lower(line);
        }
    }

    std::vector<std::string> bi_side[2];
    for (auto& p : pairs) {
        bi_side[0].push_back(std::move(p.l1));
        bi_side[1].push_back(std::move(p.l2));
    }
    const std::uint64_t bi_thresholds[2] = {settings.unk_bi_l1, settings.unk_bi_l2};
    const std::uint64_t mono_thresholds[2] = {settings.unk_mono_l1, settings.unk_mono_l2};
    const char* tags[2] = {"l1", "l2"};

    Vocabulary vocab[2];
    std::vector<Sentence> enc_bi[2], enc_mono[2];
    for (int s = 0; s < 2; ++s) {
        std::vector<std::unordered_map<std::string, std::uint64_t>> tables;
        std::vector<std::uint64_t> thresholds;
        if (have_bi) {
            tables.push_back(count_tokens(bi_side[s]));
            thresholds.push_back(bi_thresholds[s]);
        }
        if (!mono_paths[s]->empty()) {
            tables.push_back(count_tokens(mono[s]));
            thresholds.push_back(mono_thresholds[s]);
        }
        vocab[s] = Vocabulary::from_count_tables(tables, thresholds, tags[s]);
        for (const auto& line : bi_side[s]) enc_bi[s].push_back(encode(line, vocab[s]));
        for (const auto& line : mono[s]) enc_mono[s].push_back(encode(line, vocab[s]));
    }

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    OutputSet outputs;
    vocab[0].save(outputs.add(dir / kVocabL1));
    vocab[1].save(outputs.add(dir / kVocabL2));
    if (have_bi) {
        save_encoded(outputs.add(dir / kBiL1), enc_bi[0]);
        save_encoded(outputs.add(dir / kBiL2), enc_bi[1]);
    }
    if (!a.mono_l1.empty()) save_encoded(outputs.add(dir / kMonoL1), enc_mono[0]);
    if (!a.mono_l2.empty()) save_encoded(outputs.add(dir / kMonoL2), enc_mono[1]);
    outputs.commit();

    std::vector<CorpusStats> stats;
    if (have_bi) {
        stats.push_back(stats_for("bilingual-l1", "bilingual", settings.unk_bi_l1, input_pairs, enc_bi[0]));
        stats.push_back(stats_for("bilingual-l2", "bilingual", settings.unk_bi_l2, input_pairs, enc_bi[1]));
    }
    if (!a.mono_l1.empty()) {
        stats.push_back(stats_for("mono-l1", "monolingual", settings.unk_mono_l1, input_mono[0], enc_mono[0]));
    }
    if (!a.mono_l2.empty()) {
        stats.push_back(stats_for("mono-l2", "monolingual", settings.unk_mono_l2, input_mono[1], enc_mono[1]));
    }
    out << std::left << std::setw(14) << "corpus" << std::setw(13) << "type" << std::setw(15)
        << "unk_threshold" << std::setw(12) << "sentences" << std::setw(12) << "tokens" << std::setw(10)
        << "types" << "removed\n";
    bool empty = true;
    for (const auto& s : stats) {
        out << std::left << std::setw(14) << s.name << std::setw(13) << s.type << std::setw(15) << s.threshold
            << std::setw(12) << s.sentences << std::setw(12) << s.tokens << std::setw(10) << s.types
            << (s.input_sentences - s.sentences) << '\n';
        if (s.sentences > 0) empty = false;
    }
    out << "vocab-l1 size " << vocab[0].size() << "\nvocab-l2 size " << vocab[1].size() << '\n';
    if (empty) err << "warning: no sentences survived preprocessing\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string data_dir, config, out_prefix, checkpoint, resume, log;
    std::size_t checkpoint_every = 0;
    std::optional<std::size_t> bilingual_limit;
    bool no_mono = false;
    bool mono_from_bilingual = false;
    std::map<std::string, std::string> overrides;
};

struct LoadedData {
    Vocabulary vocab[2];
    ParallelCorpus bilingual;
    MonoCorpus mono[2];
    bool has_bi = false;
    bool has_mono[2] = {false, false};

    TrainingData view() const {
        return {has_bi ? &bilingual : nullptr, has_mono[0] ? &mono[0] : nullptr,
                has_mono[1] ? &mono[1] : nullptr};
    }
};

LoadedData load_data(const fs::path& dir, const RunSettings& run) {
    require_file(dir / kVocabL1, "vocabulary");
    require_file(dir / kVocabL2, "vocabulary");
    LoadedData d;
    d.vocab[0] = Vocabulary::load(dir / kVocabL1, "l1");
    d.vocab[1] = Vocabulary::load(dir / kVocabL2, "l2");
    if (fs::exists(dir / kBiL1) || fs::exists(dir / kBiL2)) {
        d.bilingual = ParallelCorpus(load_encoded(dir / kBiL1, d.vocab[0].size()),
                                     load_encoded(dir / kBiL2, d.vocab[1].size()));
        if (run.bilingual_limit > 0) d.bilingual.truncate(run.bilingual_limit);
        d.has_bi = !d.bilingual.empty();
    }
    const char* mono_files[2] = {kMonoL1, kMonoL2};
    for (int s = 0; s < 2; ++s) {
        std::vector<Sentence> sentences;
        if (run.use_mono && fs::exists(dir / mono_files[s])) {
            sentences = load_encoded(dir / mono_files[s], d.vocab[s].size());
        }
        if (run.mono_from_bilingual && d.has_bi) {
            const auto& side = d.bilingual.side(s == 0 ? Side::l1 : Side::l2);
            sentences.insert(sentences.end(), side.begin(), side.end());
        }
        d.mono[s] = MonoCorpus(s == 0 ? Side::l1 : Side::l2, std::move(sentences));
        d.has_mono[s] = !d.mono[s].eligible().empty();
    }
    if (!d.has_bi && !d.has_mono[0] && !d.has_mono[1]) {
        throw DataError("no usable training data in " + dir.string());
    }
    return d;
}

int run_train(const TrainArgs& a, std::uint64_t seed, bool seed_given, CLI::App& cmd, std::ostream& out,
              std::ostream& err) {
    TrainConfig config;
    RunSettings run;
    apply_config_file(a.config, [&](const std::string& k, const std::string& v) {
        if (!config.set(k, v)) run.set(k, v);
    });
    bool overridden = false;
    for (const auto& [key, value] : a.overrides) {
        if (cmd.get_option("--" + dashed(key))->count() > 0) {
            config.set(key, value);
            overridden = true;
        }
    }
    if (seed_given || a.config.empty()) config.seed = seed;
    if (a.bilingual_limit) run.bilingual_limit = *a.bilingual_limit;
    if (a.no_mono) run.use_mono = false;
    if (a.mono_from_bilingual) run.mono_from_bilingual = true;
    config.validate();
    if (a.data_dir.empty()) throw UsageError("--data-dir is required");
    if (a.out_prefix.empty()) throw UsageError("--out-prefix is required");
    if (!a.resume.empty()) {
        require_file(a.resume, "checkpoint");
        if (overridden || !a.config.empty()) {
            throw UsageError("--resume continues with the checkpoint's configuration; drop config flags");
        }
    }

    const LoadedData data = load_data(a.data_dir, run);
    const TrainingData view = data.view();

    std::optional<Trainer> trainer;
    if (a.resume.empty()) trainer.emplace(view, config, data.vocab[0].size(), data.vocab[1].size());
    else trainer.emplace(view, load_checkpoint(a.resume));
    if (trainer->params().l1.rows() != data.vocab[0].size() ||
        trainer->params().l2.rows() != data.vocab[1].size()) {
        throw DataError("checkpoint tables do not match the vocabulary files");
    }

    std::ofstream log_file;
    std::ostream* log = &out;
    if (!a.log.empty()) {
        log_file.open(a.log, std::ios::app);
        if (!log_file) throw DataError("cannot open log file " + a.log);
        log = &log_file;
    }
    const fs::path ckpt_path = a.checkpoint.empty() ? fs::path(a.out_prefix + ".ckpt") : fs::path(a.checkpoint);

    const auto t0 = std::chrono::steady_clock::now();
    std::size_t samples = 0;
    const std::size_t batch_samples = trainer->config().batch_size;
    while (!trainer->done()) {
        try {
            trainer->run_epoch([&](std::size_t e, std::size_t b, const LossBreakdown& l) {
                *log << format_log_line(e, b, l) << '\n';
                samples += batch_samples;
            });
        } catch (const NumericError&) {
            save_checkpoint(ckpt_path, trainer->checkpoint());
            throw;
        }
        log->flush();
        if (a.checkpoint_every > 0 && trainer->epoch() % a.checkpoint_every == 0) {
            save_checkpoint(ckpt_path, trainer->checkpoint());
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Parameters& params = trainer->params();
    if (!params.l1.all_finite() || !params.l2.all_finite()) {
        save_checkpoint(ckpt_path, trainer->checkpoint());
        throw NumericError("parameters became non-finite");
    }

    save_checkpoint(ckpt_path, trainer->checkpoint());
    OutputSet outputs;
    export_text(outputs.add(a.out_prefix + ".l1.vec"), params.l1, data.vocab[0].tokens());
    export_text(outputs.add(a.out_prefix + ".l2.vec"), params.l2, data.vocab[1].tokens());
    outputs.commit();

    err << "trained " << trainer->epoch() << " epochs (" << trainer->steps_per_epoch()
        << " batches/epoch, mix " << format_mix(trainer->mix()) << ", kernels "
        << isa_name(kernels().isa) << ")";
    if (secs > 0.0 && samples > 0) err << ", " << static_cast<long long>(samples / secs) << " samples/s";
    err << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// export

struct ExportArgs {
    std::string checkpoint, data_dir, vocab_l1, vocab_l2, out_prefix;
};

int run_export(const ExportArgs& a, std::ostream& out) {
    if (a.checkpoint.empty() || a.out_prefix.empty()) throw UsageError("--checkpoint and --out-prefix are required");
    require_file(a.checkpoint, "checkpoint");
    const fs::path v1 = !a.vocab_l1.empty() ? fs::path(a.vocab_l1) : fs::path(a.data_dir) / kVocabL1;
    const fs::path v2 = !a.vocab_l2.empty() ? fs::path(a.vocab_l2) : fs::path(a.data_dir) / kVocabL2;
    if (a.data_dir.empty() && (a.vocab_l1.empty() || a.vocab_l2.empty())) {
        throw UsageError("give --data-dir or both --vocab-l1 and --vocab-l2");
    }
    require_file(v1, "vocabulary");
    require_file(v2, "vocabulary");
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    const Vocabulary vocab1 = Vocabulary::load(v1);
    const Vocabulary vocab2 = Vocabulary::load(v2);
    OutputSet outputs;
    export_text(outputs.add(a.out_prefix + ".l1.vec"), ckpt.params.l1, vocab1.tokens());
    export_text(outputs.add(a.out_prefix + ".l2.vec"), ckpt.params.l2, vocab2.tokens());
    outputs.commit();
    out << "exported epoch " << ckpt.epoch << " to " << a.out_prefix << ".l{1,2}.vec\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// nn

struct NnArgs {
    std::string src, dst, queries_file, metric = "cosine";
    std::vector<std::string> queries;
    std::size_t k = 5;
};

int run_nn(const NnArgs& a, std::ostream& out, std::ostream& err) {
    const Metric metric = parse_metric(a.metric);
    if (a.k < 1) throw UsageError("--k must be >= 1");
    if (a.src.empty()) throw UsageError("--src is required");
    require_file(a.src, "source embeddings");
    if (!a.dst.empty()) require_file(a.dst, "target embeddings");
    if (!a.queries_file.empty()) require_file(a.queries_file, "queries file");
    std::vector<std::string> queries = a.queries;
    if (!a.queries_file.empty()) {
        for (auto& line : read_lines(a.queries_file)) {
            for (auto& tok : tokenize(line)) queries.push_back(std::move(tok));
        }
    }
    if (queries.empty()) throw UsageError("no query tokens given");

    const LoadedEmbeddings src = import_text(a.src);
    const std::optional<LoadedEmbeddings> dst_loaded =
        a.dst.empty() ? std::nullopt : std::optional<LoadedEmbeddings>(import_text(a.dst));
    const LoadedEmbeddings& dst = dst_loaded ? *dst_loaded : src;

    int status = kOk;
    for (const auto& q : queries) {
        std::vector<Neighbor> result;
        try {
            result = nearest_neighbors(q, src.vocab, src.table, dst.vocab, dst.table, a.k, metric);
        } catch (const OovError& e) {
            err << a.src << ": " << e.what() << '\n';
            status = kData;
            continue;
        }
        for (std::size_t r = 0; r < result.size(); ++r) {
            out << q << '\t' << (r + 1) << '\t' << result[r].token << '\t' << std::setprecision(6)
                << result[r].score << '\n';
        }
    }
    return status;
}

// ---------------------------------------------------------------------------
// classify-eval

struct EvalArgs {
    std::string config;
    std::string emb_l1, emb_l2, train_l1, test_l2, train_l2, test_l1, report, composition = "add",
                                                                                norm = "none";
    std::optional<std::size_t> train_size;
    std::size_t epochs = 10;
    bool lowercase = false;
};

int run_classify_eval(const EvalArgs& a, std::uint64_t seed, CLI::App& cmd, std::ostream& out) {
    RunSettings run;
    TrainConfig trained_with;
    apply_config_file(a.config, [&](const std::string& k, const std::string& v) {
        if (!trained_with.set(k, v)) run.set(k, v);
    });
    EvalConfig cfg;
    cfg.composition = cmd.get_option("--composition")->count() > 0 || a.config.empty()
                          ? parse_composition(a.composition)
                          : trained_with.composition;
    cfg.norm = parse_norm_mode(a.norm);
    cfg.epochs = cmd.get_option("--epochs")->count() > 0 ? a.epochs : run.eval_epochs;
    cfg.seed = seed;
    cfg.train_size = a.train_size ? a.train_size : run.eval_train_size;
    if (a.emb_l1.empty() || a.emb_l2.empty()) throw UsageError("--emb-l1 and --emb-l2 are required");
    const bool forward = !a.train_l1.empty() || !a.test_l2.empty();
    const bool backward = !a.train_l2.empty() || !a.test_l1.empty();
    if (forward && (a.train_l1.empty() || a.test_l2.empty())) {
        throw UsageError("--train-l1 and --test-l2 must be given together");
    }
    if (backward && (a.train_l2.empty() || a.test_l1.empty())) {
        throw UsageError("--train-l2 and --test-l1 must be given together");
    }
    if (!forward && !backward) throw UsageError("no evaluation direction given");
    if (cfg.train_size && *cfg.train_size == 0) throw UsageError("--train-size must be >= 1");
    for (const auto& f : {a.emb_l1, a.emb_l2}) require_file(f, "embeddings");
    for (const auto& f : {a.train_l1, a.test_l2, a.train_l2, a.test_l1}) {
        if (!f.empty()) require_file(f, "document file");
    }

    const LoadedEmbeddings e1 = import_text(a.emb_l1, "l1");
    const LoadedEmbeddings e2 = import_text(a.emb_l2, "l2");
    if (e1.table.dim() != e2.table.dim()) throw DimensionError("embedding files differ in dimension");

    std::string text;
    if (forward) {
        const auto train = encode_documents(read_documents(a.train_l1), e1.vocab, a.lowercase);
        const auto test = encode_documents(read_documents(a.test_l2), e2.vocab, a.lowercase);
        text += crosslingual_eval(train, e1.table, test, e2.table, cfg, "l1->l2").to_text();
    }
    if (backward) {
        const auto train = encode_documents(read_documents(a.train_l2), e2.vocab, a.lowercase);
        const auto test = encode_documents(read_documents(a.test_l1), e1.vocab, a.lowercase);
        if (!text.empty()) text += '\n';
        text += crosslingual_eval(train, e2.table, test, e1.table, cfg, "l2->l1").to_text();
    }
    if (!a.report.empty()) {
        OutputSet outputs;
        std::ofstream f(outputs.add(a.report));
        f << text;
        f.close();
        if (!f) throw DataError("cannot write report " + a.report);
        outputs.commit();
    }
    out << text;
    return kOk;
}

// ---------------------------------------------------------------------------
// compose

struct ComposeArgs {
    std::string emb, docs, out, composition = "add", norm = "none";
    bool lowercase = false;
};

int run_compose(const ComposeArgs& a, std::ostream& out) {
    const CompositionKind kind = parse_composition(a.composition);
    const NormMode norm = parse_norm_mode(a.norm);
    if (a.emb.empty() || a.docs.empty() || a.out.empty()) {
        throw UsageError("--emb, --docs and --out are required");
    }
    require_file(a.emb, "embeddings");
    require_file(a.docs, "document file");
    const LoadedEmbeddings emb = import_text(a.emb);
    const auto docs = encode_documents(read_documents(a.docs), emb.vocab, a.lowercase);

    EmbeddingTable vectors(docs.size(), emb.table.dim());
    std::vector<std::string> ids;
    ids.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto v = represent_document(docs[i].sentences, emb.table, kind, norm);
        std::copy(v.begin(), v.end(), vectors.row(static_cast<WordId>(i)).begin());
        ids.push_back(docs[i].doc_id);
    }
    OutputSet outputs;
    export_text(outputs.add(a.out), vectors, ids);
    outputs.commit();
    out << "composed " << docs.size() << " documents\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compositional crosslingual word embeddings: preprocess, train, inspect, evaluate"};
    app.require_subcommand(1, 1);
    app.option_defaults()->always_capture_default();
    std::uint64_t seed = kDefaultSeed;

    const auto add_seed = [&](CLI::App* c) {
        return c->add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();
    };

    // preprocess
    PreprocessArgs pre;
    auto* pre_cmd = app.add_subcommand("preprocess", "Filter corpora, build vocabularies, encode sentences");
    pre_cmd->add_option("--bi-l1", pre.bi_l1, "Bilingual corpus, language 1 (one sentence per line)");
    pre_cmd->add_option("--bi-l2", pre.bi_l2, "Bilingual corpus, language 2 (line-aligned with --bi-l1)");
    pre_cmd->add_option("--mono-l1", pre.mono_l1, "Monolingual corpus, language 1");
    pre_cmd->add_option("--mono-l2", pre.mono_l2, "Monolingual corpus, language 2");
    pre_cmd->add_option("--out-dir", pre.out_dir, "Output directory")->required();
    pre_cmd->add_option("--config", pre.config, "key = value config file");
    pre_cmd->add_flag("--lowercase", pre.lowercase, "Lowercase text after filtering");
    for (const auto& [key, def] : PreprocessSettings{}.defaults()) {
        pre.overrides[key] = def;
        pre_cmd->add_option("--" + dashed(key), pre.overrides[key], key)->default_str(def);
    }

    // train
    TrainArgs tr;
    bool seed_given = false;
    auto* train_cmd = app.add_subcommand("train", "Train embeddings with AdaGrad");
    train_cmd->add_option("--data-dir", tr.data_dir, "Directory written by preprocess")->required();
    train_cmd->add_option("--out-prefix", tr.out_prefix, "Writes PREFIX.l1.vec, PREFIX.l2.vec, PREFIX.ckpt")
        ->required();
    train_cmd->add_option("--config", tr.config, "key = value config file");
    train_cmd->add_option("--checkpoint", tr.checkpoint, "Checkpoint path (default PREFIX.ckpt)");
    train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint every N epochs (0: end only)")
        ->capture_default_str();
    train_cmd->add_option("--resume", tr.resume, "Continue from a checkpoint");
    train_cmd->add_option("--log", tr.log, "Append per-batch loss lines here instead of stdout");
    train_cmd->add_option("--bilingual-limit", tr.bilingual_limit, "Use only the first N sentence pairs");
    train_cmd->add_flag("--no-mono", tr.no_mono, "Ignore monolingual corpora");
    train_cmd->add_flag("--mono-from-bilingual", tr.mono_from_bilingual,
                        "Also feed the bilingual sentences to the monolingual objective");
    for (const auto& [key, def] : train_defaults()) {
        tr.overrides[key] = def;
        train_cmd->add_option("--" + dashed(key), tr.overrides[key], key)->default_str(def);
    }
    add_seed(train_cmd);

    // export
    ExportArgs ex;
    auto* export_cmd = app.add_subcommand("export", "Write embeddings from a checkpoint in text format");
    export_cmd->add_option("--checkpoint", ex.checkpoint, "Checkpoint file")->required();
    export_cmd->add_option("--data-dir", ex.data_dir, "Directory holding vocab.l1.tsv / vocab.l2.tsv");
    export_cmd->add_option("--vocab-l1", ex.vocab_l1, "Vocabulary file, language 1");
    export_cmd->add_option("--vocab-l2", ex.vocab_l2, "Vocabulary file, language 2");
    export_cmd->add_option("--out-prefix", ex.out_prefix, "Writes PREFIX.l1.vec and PREFIX.l2.vec")->required();

    // nn
    NnArgs nn;
    auto* nn_cmd = app.add_subcommand("nn", "Nearest neighbors of query tokens");
    nn_cmd->add_option("--src", nn.src, "Embeddings holding the query tokens")->required();
    nn_cmd->add_option("--dst", nn.dst, "Embeddings to search (default: --src)");
    nn_cmd->add_option("--query,-q", nn.queries, "Query token (repeatable)");
    nn_cmd->add_option("--queries-file", nn.queries_file, "Whitespace-separated query tokens");
    nn_cmd->add_option("--k", nn.k, "Neighbors per query")->capture_default_str();
    nn_cmd->add_option("--metric", nn.metric, "cosine or euclidean")->capture_default_str();

    // classify-eval
    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("classify-eval", "Crosslingual document classification");
    eval_cmd->add_option("--config", ev.config, "key = value config file (eval_* and composition keys apply)");
    eval_cmd->add_option("--emb-l1", ev.emb_l1, "Embeddings, language 1")->required();
    eval_cmd->add_option("--emb-l2", ev.emb_l2, "Embeddings, language 2")->required();
    eval_cmd->add_option("--train-l1", ev.train_l1, "Training documents in language 1");
    eval_cmd->add_option("--test-l2", ev.test_l2, "Test documents in language 2");
    eval_cmd->add_option("--train-l2", ev.train_l2, "Training documents in language 2");
    eval_cmd->add_option("--test-l1", ev.test_l1, "Test documents in language 1");
    eval_cmd->add_option("--train-size", ev.train_size, "Seeded subsample of the training documents");
    eval_cmd->add_option("--epochs", ev.epochs, "Perceptron passes")->capture_default_str();
    eval_cmd->add_option("--composition", ev.composition, "add or bi")->capture_default_str();
    eval_cmd->add_option("--norm", ev.norm, "none, by_token_count or unit_l2")->capture_default_str();
    eval_cmd->add_option("--report", ev.report, "Also write the report here");
    eval_cmd->add_flag("--lowercase", ev.lowercase, "Lowercase documents before lookup");
    add_seed(eval_cmd);

    // compose
    ComposeArgs co;
    auto* compose_cmd = app.add_subcommand("compose", "Compose document vectors");
    compose_cmd->add_option("--emb", co.emb, "Embeddings file")->required();
    compose_cmd->add_option("--docs", co.docs, "Document file")->required();
    compose_cmd->add_option("--out", co.out, "Output vectors (embedding text format)")->required();
    compose_cmd->add_option("--composition", co.composition, "add or bi")->capture_default_str();
    compose_cmd->add_option("--norm", co.norm, "none, by_token_count or unit_l2")->capture_default_str();
    compose_cmd->add_flag("--lowercase", co.lowercase, "Lowercase documents before lookup");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*pre_cmd) return run_preprocess(pre, *pre_cmd, out, err);
        if (*train_cmd) {
            seed_given = train_cmd->get_option("--seed")->count() > 0;
            return run_train(tr, seed, seed_given, *train_cmd, out, err);
        }
        if (*export_cmd) return run_export(ex, out);
        if (*nn_cmd) return run_nn(nn, out, err);
        if (*eval_cmd) return run_classify_eval(ev, seed, *eval_cmd, out);
        if (*compose_cmd) return run_compose(co, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace xlemb::cli

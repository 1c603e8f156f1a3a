#include "xlemb/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xlemb/error.hpp"

namespace xlemb {
namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string bad_value(std::string_view key, std::string_view value) {
    return "invalid value '" + std::string(value) + "' for " + std::string(key);
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
        throw UsageError(bad_value(key, v));
    }
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw UsageError(bad_value(key, v));
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin) {
    std::vector<KeyValue> out;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(std::string(origin) + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw UsageError(std::string(origin) + ":" + std::to_string(lineno) + ": empty key");
        }
        out.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), lineno});
    }
    return out;
}

std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

std::string format_mix(const MixFractions& mix) {
    return fmt_double(mix.bilingual) + "," + fmt_double(mix.mono_l1) + "," + fmt_double(mix.mono_l2);
}

MixFractions parse_mix(std::string_view text) {
    double parts[3];
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = trim(text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos));
        if (n == 3) throw UsageError("mix expects three comma-separated fractions");
        parts[n++] = to_double("mix", piece);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (n != 3) throw UsageError("mix expects three comma-separated fractions");
    return {parts[0], parts[1], parts[2]};
}

bool TrainConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "dim") dim = to_uint(key, value);
    else if (key == "learning_rate") learning_rate = to_double(key, value);
    else if (key == "batch_size") batch_size = to_uint(key, value);
    else if (key == "margin") {
        if (value == "dim" || value.empty()) margin.reset();
        else margin = to_double(key, value);
    } else if (key == "lambda") lambda = to_double(key, value);
    else if (key == "epochs_bi_only") epochs_bi_only = to_uint(key, value);
    else if (key == "epochs_with_mono") epochs_with_mono = to_uint(key, value);
    else if (key == "epochs") {
        if (value == "auto" || value.empty()) epochs.reset();
        else epochs = to_uint(key, value);
    } else if (key == "mix") {
        if (value == "proportional" || value.empty()) mix.reset();
        else mix = parse_mix(value);
    } else if (key == "seed") seed = to_uint(key, value);
    else if (key == "adagrad_epsilon") adagrad_epsilon = to_double(key, value);
    else if (key == "init_sigma") init_sigma = to_double(key, value);
    else if (key == "composition") composition = parse_composition(value);
    else if (key == "threads") threads = to_uint(key, value);
    else return false;
    return true;
}

void TrainConfig::validate() const {
    if (dim < 1) throw UsageError("dim must be >= 1");
    if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be > 0");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (margin && *margin < 0.0) throw UsageError("margin must be >= 0");
    if (lambda < 0.0) throw UsageError("lambda must be >= 0");
    if (!(adagrad_epsilon > 0.0)) throw UsageError("adagrad_epsilon must be > 0");
    if (!(init_sigma > 0.0)) throw UsageError("init_sigma must be > 0");
    if (threads < 1) throw UsageError("threads must be >= 1");
    if (mix) {
        if (mix->bilingual < 0.0 || mix->mono_l1 < 0.0 || mix->mono_l2 < 0.0) {
            throw UsageError("mix fractions must be >= 0");
        }
        const double sum = mix->bilingual + mix->mono_l1 + mix->mono_l2;
        if (std::abs(sum - 1.0) > 1e-9) throw UsageError("mix fractions must sum to 1");
    }
}

std::string TrainConfig::to_text() const {
    std::ostringstream out;
    out << "dim = " << dim << '\n'
        << "learning_rate = " << fmt_double(learning_rate) << '\n'
        << "batch_size = " << batch_size << '\n'
        << "margin = " << (margin ? fmt_double(*margin) : std::string("dim")) << '\n'
        << "lambda = " << fmt_double(lambda) << '\n'
        << "epochs_bi_only = " << epochs_bi_only << '\n'
        << "epochs_with_mono = " << epochs_with_mono << '\n'
        << "epochs = " << (epochs ? std::to_string(*epochs) : std::string("auto")) << '\n'
        << "mix = " << (mix ? format_mix(*mix) : std::string("proportional")) << '\n'
        << "seed = " << seed << '\n'
        << "adagrad_epsilon = " << fmt_double(adagrad_epsilon) << '\n'
        << "init_sigma = " << fmt_double(init_sigma) << '\n'
        << "composition = " << to_string(composition) << '\n'
        << "threads = " << threads << '\n';
    return out.str();
}

TrainConfig TrainConfig::from_text(std::string_view text) {
    TrainConfig c;
    for (const auto& kv : parse_key_values(text)) {
        if (!c.set(kv.key, kv.value)) throw UsageError("unknown config key '" + kv.key + "'");
    }
    return c;
}

}  // namespace xlemb

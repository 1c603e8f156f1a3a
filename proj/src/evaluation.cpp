#include "xlemb/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "xlemb/error.hpp"

namespace xlemb {

std::vector<std::size_t> subsample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n >= size) return idx;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

EvalReport crosslingual_eval(const std::vector<LabeledDocument>& train_docs,
                             const EmbeddingTable& train_table,
                             const std::vector<LabeledDocument>& test_docs,
                             const EmbeddingTable& test_table, const EvalConfig& config,
                             std::string direction) {
    if (train_table.dim() != test_table.dim()) {
        throw DimensionError("evaluation: embedding tables differ in dimension");
    }
    if (train_docs.empty() || test_docs.empty()) throw DataError("evaluation: empty document set");

    const auto chosen = subsample_indices(train_docs.size(),
                                          config.train_size.value_or(train_docs.size()), config.seed);

    std::set<std::string> label_set;
    for (std::size_t i : chosen) label_set.insert(train_docs[i].label);
    std::vector<std::string> classes(label_set.begin(), label_set.end());
    std::map<std::string, std::size_t> class_index;
    for (std::size_t c = 0; c < classes.size(); ++c) class_index[classes[c]] = c;
    for (const auto& d : test_docs) {
        if (!class_index.contains(d.label)) {
            throw LabelError("label set mismatch: test label '" + d.label +
                             "' does not occur in the training documents");
        }
    }

    std::vector<std::vector<double>> train_x;
    std::vector<std::size_t> train_y;
    train_x.reserve(chosen.size());
    for (std::size_t i : chosen) {
        train_x.push_back(represent_document(train_docs[i].sentences, train_table,
                                             config.composition, config.norm));
        train_y.push_back(class_index.at(train_docs[i].label));
    }
    const PerceptronModel model = perceptron_train(train_x, train_y, classes, config.epochs, config.seed);

    EvalReport report;
    report.direction = std::move(direction);
    report.classes = classes;
    report.confusion.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
    report.train_size = chosen.size();
    report.test_size = test_docs.size();
    std::size_t correct = 0;
    for (const auto& d : test_docs) {
        const auto x = represent_document(d.sentences, test_table, config.composition, config.norm);
        const std::size_t truth = class_index.at(d.label);
        const std::size_t pred = model.predict(x);
        ++report.confusion[truth][pred];
        if (truth == pred) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(test_docs.size());

    std::ostringstream echo;
    echo << "composition=" << to_string(config.composition) << '\n'
         << "norm=" << to_string(config.norm) << '\n'
         << "epochs=" << config.epochs << '\n'
         << "seed=" << config.seed << '\n';
    report.config_echo = echo.str();
    return report;
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", accuracy);
    out << "direction: " << direction << '\n'
        << "train documents: " << train_size << '\n'
        << "test documents: " << test_size << '\n'
        << "accuracy: " << acc << '\n'
        << "confusion (rows = true, columns = predicted):\n";
    for (std::size_t r = 0; r < classes.size(); ++r) {
        out << "  " << classes[r] << ':';
        for (std::size_t c = 0; c < classes.size(); ++c) out << ' ' << confusion[r][c];
        out << '\n';
    }
    out << "---\n"
        << "direction=" << direction << '\n'
        << "accuracy=" << acc << '\n'
        << "train_size=" << train_size << '\n'
        << "test_size=" << test_size << '\n'
        << "classes=";
    for (std::size_t c = 0; c < classes.size(); ++c) out << (c ? "," : "") << classes[c];
    out << '\n';
    for (std::size_t r = 0; r < classes.size(); ++r) {
        out << "confusion." << classes[r] << '=';
        for (std::size_t c = 0; c < classes.size(); ++c) out << (c ? "," : "") << confusion[r][c];
        out << '\n';
    }
    out << config_echo;
    return out.str();
}

}  // namespace xlemb

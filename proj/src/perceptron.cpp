#include "xlemb/perceptron.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"

namespace xlemb {

PerceptronModel::PerceptronModel(std::vector<std::string> classes, std::size_t dim)
    : classes_(std::move(classes)),
      dim_(dim),
      weights_(classes_.size() * dim, 0.0),
      averaged_(classes_.size() * dim, 0.0) {
    if (classes_.empty()) throw LabelError("perceptron needs at least one class");
}

std::size_t PerceptronModel::predict(std::span<const double> x, bool use_average) const {
    if (x.size() != dim_) throw DimensionError("perceptron: feature dimension mismatch");
    const std::vector<double>& w = use_average ? averaged_ : weights_;
    const Kernels& k = kernels();
    std::size_t best = 0;
    double best_score = k.dot(w.data(), x.data(), dim_);
    for (std::size_t c = 1; c < classes_.size(); ++c) {
        const double s = k.dot(w.data() + c * dim_, x.data(), dim_);
        if (s > best_score) {
            best = c;
            best_score = s;
        }
    }
    return best;
}

PerceptronModel perceptron_train(std::span<const std::vector<double>> features,
                                 std::span<const std::size_t> labels,
                                 std::vector<std::string> classes, std::size_t epochs,
                                 std::uint64_t seed) {
    if (features.size() != labels.size()) throw DataError("perceptron: features/labels size mismatch");
    if (features.empty()) throw DataError("perceptron: no training examples");
    const std::size_t dim = features.front().size();
    for (const auto& f : features) {
        if (f.size() != dim) throw DimensionError("perceptron: feature vectors differ in dimension");
    }
    const std::set<std::size_t> present(labels.begin(), labels.end());
    if (*present.rbegin() >= classes.size()) throw LabelError("perceptron: label index out of range");
    if (present.size() < 2) throw LabelError("perceptron: training data contains a single class");

    PerceptronModel model(std::move(classes), dim);
    model.epochs = epochs;
    model.seed = seed;
    const std::size_t n_classes = model.num_classes();
    const Kernels& k = kernels();

    std::vector<double>& w = model.weights_;
    std::vector<double>& total = model.averaged_;
    std::vector<std::uint64_t> last(n_classes, 0);
    std::uint64_t t = 0;

    // Folds the interval since the class's last change into its running sum.
    const auto settle = [&](std::size_t c) {
        const double span = static_cast<double>(t - last[c]);
        if (span > 0.0) k.axpy(total.data() + c * dim, span, w.data() + c * dim, dim);
        last[c] = t;
    };

    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const auto& x = features[idx];
            const std::size_t y = labels[idx];
            const std::size_t p = model.predict(x, /*use_average=*/false);
            if (p != y) {
                settle(y);
                settle(p);
                k.add(w.data() + y * dim, x.data(), dim);
                k.axpy(w.data() + p * dim, -1.0, x.data(), dim);
            }
            ++t;
        }
    }
    for (std::size_t c = 0; c < n_classes; ++c) settle(c);
    if (t > 0) k.scale(total.data(), 1.0 / static_cast<double>(t), total.size());
    else total = w;
    return model;
}

}  // namespace xlemb

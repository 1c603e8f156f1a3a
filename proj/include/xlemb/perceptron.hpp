#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xlemb {

/// Multiclass averaged perceptron over dense feature vectors.
///
/// Scores are w_c . x with no bias term; ties go to the lowest class index.
/// The averaged weights are the mean of the weight vectors after every
/// training example, accumulated lazily with per-class timestamps.
class PerceptronModel {
public:
    PerceptronModel() = default;
    PerceptronModel(std::vector<std::string> classes, std::size_t dim);

    std::size_t num_classes() const { return classes_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& classes() const { return classes_; }

    std::span<const double> weights(std::size_t c) const { return {weights_.data() + c * dim_, dim_}; }
    std::span<const double> averaged(std::size_t c) const { return {averaged_.data() + c * dim_, dim_}; }

    std::size_t predict(std::span<const double> x, bool use_average = true) const;

    std::size_t epochs = 0;
    std::uint64_t seed = 0;

private:
    friend PerceptronModel perceptron_train(std::span<const std::vector<double>>,
                                            std::span<const std::size_t>, std::vector<std::string>,
                                            std::size_t, std::uint64_t);

    std::vector<std::string> classes_;
    std::size_t dim_ = 0;
    std::vector<double> weights_;
    std::vector<double> averaged_;
};

/// Trains for `epochs` passes; the example order is reshuffled at the start
/// of each pass. Throws LabelError when fewer than two classes are present.
PerceptronModel perceptron_train(std::span<const std::vector<double>> features,
                                 std::span<const std::size_t> labels,
                                 std::vector<std::string> classes, std::size_t epochs = 10,
                                 std::uint64_t seed = 1);

}  // namespace xlemb

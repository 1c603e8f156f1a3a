#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "xlemb/composition.hpp"
#include "xlemb/corpus.hpp"
#include "xlemb/embedding_table.hpp"

namespace xlemb {

/// The full parameter set: one embedding table per language.
struct Parameters {
    EmbeddingTable l1;
    EmbeddingTable l2;

    EmbeddingTable& table(Side s) { return s == Side::l1 ? l1 : l2; }
    const EmbeddingTable& table(Side s) const { return s == Side::l1 ? l1 : l2; }
    std::size_t total_rows() const { return l1.rows() + l2.rows(); }
    std::size_t dim() const { return l1.dim(); }

    friend bool operator==(const Parameters&, const Parameters&) = default;
};

struct LossBreakdown {
    double bilingual = 0.0;
    double mono_l1 = 0.0;
    double mono_l2 = 0.0;
    double regularizer = 0.0;
    double total = 0.0;

    void finalize() { total = bilingual + mono_l1 + mono_l2 + regularizer; }
    LossBreakdown& operator+=(const LossBreakdown& o);
    friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

/// Sparse gradient over rows of both tables. Absent rows are zero. Rows are
/// iterated in first-touch order, which keeps updates reproducible.
class GradientAccumulator {
public:
    explicit GradientAccumulator(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return side_[0].ids.size() + side_[1].ids.size(); }
    bool empty() const { return size() == 0; }

    /// Row for (side, id), created as zeros on first access.
    std::span<double> row(Side side, WordId id);
    /// Null when the row has not been touched.
    const double* find(Side side, WordId id) const;

    const std::vector<WordId>& touched(Side side) const { return side_[index_of(side)].ids; }
    std::span<const double> row_at(Side side, std::size_t k) const {
        return {side_[index_of(side)].values.data() + k * dim_, dim_};
    }

    /// Sparse addition; touched rows of `other` are appended in its order.
    void merge(const GradientAccumulator& other);
    void clear();
    bool all_finite() const;

private:
    struct Rows {
        std::unordered_map<WordId, std::size_t> slot;
        std::vector<WordId> ids;
        std::vector<double> values;
    };
    std::size_t dim_;
    Rows side_[2];
};

struct BilingualSample {
    std::span<const WordId> l1;
    std::span<const WordId> l2;
};

struct MonoSample {
    std::span<const WordId> outer;
    std::span<const WordId> inner;
    std::span<const WordId> noise;
};

/// One mini-batch. Spans point into corpus storage that must outlive it.
struct Batch {
    std::vector<BilingualSample> bilingual;
    std::vector<MonoSample> mono_l1;
    std::vector<MonoSample> mono_l2;

    std::vector<MonoSample>& mono(Side s) { return s == Side::l1 ? mono_l1 : mono_l2; }
    const std::vector<MonoSample>& mono(Side s) const { return s == Side::l1 ? mono_l1 : mono_l2; }
    std::size_t size() const { return bilingual.size() + mono_l1.size() + mono_l2.size(); }
};

// Squared euclidean distance between aligned sentence vectors.
double bilingual_loss(std::span<const double> v1, std::span<const double> v2);

struct BilingualGrad {
    std::vector<double> v1;
    std::vector<double> v2;
};
BilingualGrad bilingual_grad(std::span<const double> v1, std::span<const double> v2);

/// Inclusion loss:
///   [max(0, m + |out-in|^2 - |out-noise|^2) + |out-in|^2] * len(in)/len(out)
/// Lengths come from source_len. The hinge is treated as inactive when its
/// argument is exactly zero.
double mono_loss(const ComposedVector& outer, const ComposedVector& inner,
                 const ComposedVector& noise, double margin);

struct MonoGrad {
    std::vector<double> outer;
    std::vector<double> inner;
    std::vector<double> noise;
    bool hinge_active = false;
};
MonoGrad mono_grad(const ComposedVector& outer, const ComposedVector& inner,
                   const ComposedVector& noise, double margin);

/// lambda * sum of squared entries over both tables.
double l2_regularizer(const Parameters& params, double lambda);

/// Per-batch regularizer weight: lambda * touched_rows / total_rows.
double effective_lambda(double lambda, std::size_t touched_rows, std::size_t total_rows);

/// Data terms only: sums bilingual and inclusion losses over the batch and
/// accumulates their exact gradients into `acc`.
LossBreakdown data_loss_and_grad(const Batch& batch, const Parameters& params,
                                 CompositionKind kind, double margin, GradientAccumulator& acc);

/// Adds 2*lambda_eff*w to every touched row and returns lambda_eff * sum of
/// the touched rows' squared norms.
double apply_regularizer(const Parameters& params, double lambda, GradientAccumulator& acc);

/// Full mini-batch objective: data terms plus the stochastic regularizer.
LossBreakdown batch_loss_and_grad(const Batch& batch, const Parameters& params,
                                  CompositionKind kind, double margin, double lambda,
                                  GradientAccumulator& acc);

}  // namespace xlemb

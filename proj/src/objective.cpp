#include "xlemb/objective.hpp"

#include <cmath>

#include "xlemb/error.hpp"
#include "xlemb/kernels.hpp"

namespace xlemb {

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
    bilingual += o.bilingual;
    mono_l1 += o.mono_l1;
    mono_l2 += o.mono_l2;
    regularizer += o.regularizer;
    finalize();
    return *this;
}

std::span<double> GradientAccumulator::row(Side side, WordId id) {
    Rows& rows = side_[index_of(side)];
    auto [it, inserted] = rows.slot.try_emplace(id, rows.ids.size());
    if (inserted) {
        rows.ids.push_back(id);
        rows.values.resize(rows.values.size() + dim_, 0.0);
    }
    return {rows.values.data() + it->second * dim_, dim_};
}

const double* GradientAccumulator::find(Side side, WordId id) const {
    const Rows& rows = side_[index_of(side)];
    auto it = rows.slot.find(id);
    return it == rows.slot.end() ? nullptr : rows.values.data() + it->second * dim_;
}

void GradientAccumulator::merge(const GradientAccumulator& other) {
    if (other.dim_ != dim_) throw DimensionError("accumulator merge: dimension mismatch");
    const Kernels& k = kernels();
    for (Side s : {Side::l1, Side::l2}) {
        const Rows& src = other.side_[index_of(s)];
        for (std::size_t i = 0; i < src.ids.size(); ++i) {
            k.add(row(s, src.ids[i]).data(), src.values.data() + i * dim_, dim_);
        }
    }
}

void GradientAccumulator::clear() {
    for (Rows& r : side_) {
        r.slot.clear();
        r.ids.clear();
        r.values.clear();
    }
}

bool GradientAccumulator::all_finite() const {
    for (const Rows& r : side_) {
        for (double v : r.values) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

double bilingual_loss(std::span<const double> v1, std::span<const double> v2) {
    if (v1.size() != v2.size()) throw DimensionError("bilingual_loss: dimension mismatch");
    return kernels().sq_dist(v1.data(), v2.data(), v1.size());
}

BilingualGrad bilingual_grad(std::span<const double> v1, std::span<const double> v2) {
    if (v1.size() != v2.size()) throw DimensionError("bilingual_grad: dimension mismatch");
    BilingualGrad g{std::vector<double>(v1.size()), std::vector<double>(v1.size())};
    for (std::size_t j = 0; j < v1.size(); ++j) {
        const double d = 2.0 * (v1[j] - v2[j]);
        g.v1[j] = d;
        g.v2[j] = -d;
    }
    return g;
}

namespace {

void check_mono_inputs(const ComposedVector& outer, const ComposedVector& inner,
                       const ComposedVector& noise) {
    if (outer.dim() != inner.dim() || outer.dim() != noise.dim()) {
        throw DimensionError("mono_loss: dimension mismatch");
    }
    if (inner.source_len < 1 || outer.source_len < 1) {
        throw DataError("mono_loss: phrase lengths must be >= 1");
    }
    if (inner.source_len > outer.source_len) {
        throw DataError("mono_loss: inner phrase longer than outer phrase");
    }
}

double length_ratio(std::size_t inner_len, std::size_t outer_len) {
    return static_cast<double>(inner_len) / static_cast<double>(outer_len);
}

// Loss and gradients for one triple given composed vectors; gradients are
// written to the three output buffers (size dim). Returns the loss.
double mono_term(const double* o, const double* in, const double* no, std::size_t dim,
                 double margin, double ratio, double* g_o, double* g_in, double* g_no) {
    const Kernels& k = kernels();
    const double d_in = k.sq_dist(o, in, dim);
    const double d_no = k.sq_dist(o, no, dim);
    const double hinge_arg = margin + d_in - d_no;
    const bool active = hinge_arg > 0.0;
    const double loss = ((active ? hinge_arg : 0.0) + d_in) * ratio;

    // d/d(o) of d_in is 2(o-in); of d_no is 2(o-no).
    const double c_in = 2.0 * ratio * (active ? 2.0 : 1.0);
    const double c_no = active ? 2.0 * ratio : 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double diff_in = o[j] - in[j];
        const double diff_no = o[j] - no[j];
        g_o[j] = c_in * diff_in - c_no * diff_no;
        g_in[j] = -c_in * diff_in;
        g_no[j] = c_no * diff_no;
    }
    return loss;
}

}  // namespace

double mono_loss(const ComposedVector& outer, const ComposedVector& inner,
                 const ComposedVector& noise, double margin) {
    check_mono_inputs(outer, inner, noise);
    const Kernels& k = kernels();
    const std::size_t dim = outer.dim();
    const double d_in = k.sq_dist(outer.values.data(), inner.values.data(), dim);
    const double d_no = k.sq_dist(outer.values.data(), noise.values.data(), dim);
    const double hinge_arg = margin + d_in - d_no;
    return ((hinge_arg > 0.0 ? hinge_arg : 0.0) + d_in) *
           length_ratio(inner.source_len, outer.source_len);
}

MonoGrad mono_grad(const ComposedVector& outer, const ComposedVector& inner,
                   const ComposedVector& noise, double margin) {
    check_mono_inputs(outer, inner, noise);
    const std::size_t dim = outer.dim();
    MonoGrad g{std::vector<double>(dim), std::vector<double>(dim), std::vector<double>(dim), false};
    const double ratio = length_ratio(inner.source_len, outer.source_len);
    mono_term(outer.values.data(), inner.values.data(), noise.values.data(), dim, margin, ratio,
              g.outer.data(), g.inner.data(), g.noise.data());
    const double d_in = kernels().sq_dist(outer.values.data(), inner.values.data(), dim);
    const double d_no = kernels().sq_dist(outer.values.data(), noise.values.data(), dim);
    g.hinge_active = margin + d_in - d_no > 0.0;
    return g;
}

double l2_regularizer(const Parameters& params, double lambda) {
    if (lambda < 0.0) throw UsageError("lambda must be >= 0");
    return lambda * (params.l1.squared_norm() + params.l2.squared_norm());
}

double effective_lambda(double lambda, std::size_t touched_rows, std::size_t total_rows) {
    if (total_rows == 0) return 0.0;
    return lambda * static_cast<double>(touched_rows) / static_cast<double>(total_rows);
}

namespace {

struct Workspace {
    explicit Workspace(std::size_t dim) : a(dim), b(dim), c(dim), ga(dim), gb(dim), gc(dim) {}
    std::vector<double> a, b, c;
    std::vector<double> ga, gb, gc;
    std::vector<double> word_grads;
};

void scatter(CompositionKind kind, const EmbeddingTable& table, Side side,
             std::span<const WordId> ids, const std::vector<double>& upstream, Workspace& ws,
             GradientAccumulator& acc) {
    const std::size_t dim = table.dim();
    ws.word_grads.resize(ids.size() * dim);
    compose_backward(kind, table, ids, upstream, ws.word_grads);
    const Kernels& k = kernels();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        k.add(acc.row(side, ids[i]).data(), ws.word_grads.data() + i * dim, dim);
    }
}

}  // namespace

LossBreakdown data_loss_and_grad(const Batch& batch, const Parameters& params,
                                 CompositionKind kind, double margin, GradientAccumulator& acc) {
    const std::size_t dim = params.dim();
    if (params.l2.dim() != dim || acc.dim() != dim) {
        throw DimensionError("objective: parameter/accumulator dimension mismatch");
    }
    LossBreakdown loss;
    Workspace ws(dim);
    const Kernels& k = kernels();

    for (const auto& s : batch.bilingual) {
        compose_into(kind, params.l1, s.l1, ws.a);
        compose_into(kind, params.l2, s.l2, ws.b);
        loss.bilingual += k.sq_dist(ws.a.data(), ws.b.data(), dim);
        for (std::size_t j = 0; j < dim; ++j) {
            ws.ga[j] = 2.0 * (ws.a[j] - ws.b[j]);
            ws.gb[j] = -ws.ga[j];
        }
        scatter(kind, params.l1, Side::l1, s.l1, ws.ga, ws, acc);
        scatter(kind, params.l2, Side::l2, s.l2, ws.gb, ws, acc);
    }

    for (Side side : {Side::l1, Side::l2}) {
        const EmbeddingTable& table = params.table(side);
        double& total = side == Side::l1 ? loss.mono_l1 : loss.mono_l2;
        for (const auto& s : batch.mono(side)) {
            if (s.inner.size() > s.outer.size() || s.inner.empty()) {
                throw DataError("objective: inner phrase must be non-empty and no longer than outer");
            }
            compose_into(kind, table, s.outer, ws.a);
            compose_into(kind, table, s.inner, ws.b);
            compose_into(kind, table, s.noise, ws.c);
            const double ratio = length_ratio(s.inner.size(), s.outer.size());
            total += mono_term(ws.a.data(), ws.b.data(), ws.c.data(), dim, margin, ratio,
                               ws.ga.data(), ws.gb.data(), ws.gc.data());
            scatter(kind, table, side, s.outer, ws.ga, ws, acc);
            scatter(kind, table, side, s.inner, ws.gb, ws, acc);
            scatter(kind, table, side, s.noise, ws.gc, ws, acc);
        }
    }
    loss.finalize();
    return loss;
}

double apply_regularizer(const Parameters& params, double lambda, GradientAccumulator& acc) {
    if (lambda < 0.0) throw UsageError("lambda must be >= 0");
    if (lambda == 0.0) return 0.0;
    const double lam = effective_lambda(lambda, acc.size(), params.total_rows());
    const Kernels& k = kernels();
    const std::size_t dim = acc.dim();
    double penalty = 0.0;
    for (Side side : {Side::l1, Side::l2}) {
        const EmbeddingTable& table = params.table(side);
        for (WordId id : acc.touched(side)) {
            const double* w = table.row(id).data();
            penalty += k.dot(w, w, dim);
            k.axpy(acc.row(side, id).data(), 2.0 * lam, w, dim);
        }
    }
    return lam * penalty;
}

LossBreakdown batch_loss_and_grad(const Batch& batch, const Parameters& params,
                                  CompositionKind kind, double margin, double lambda,
                                  GradientAccumulator& acc) {
    LossBreakdown loss = data_loss_and_grad(batch, params, kind, margin, acc);
    loss.regularizer = apply_regularizer(params, lambda, acc);
    loss.finalize();
    return loss;
}

}  // namespace xlemb

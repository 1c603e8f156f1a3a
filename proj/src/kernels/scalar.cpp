#include "xlemb/kernels.hpp"

#include <cmath>

namespace xlemb::detail {
namespace {

void add_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void axpy_scalar(double* dst, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * x[i];
}

void sub_scalar(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_scalar(double* dst, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= alpha;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void adagrad_scalar(double* w, const double* g, double* acc, double lr, double eps,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += g[i] * g[i];
        w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels table{Isa::scalar, add_scalar,     axpy_scalar,   sub_scalar,
                               scale_scalar, dot_scalar,   sq_dist_scalar, adagrad_scalar};
    return table;
}

}  // namespace xlemb::detail

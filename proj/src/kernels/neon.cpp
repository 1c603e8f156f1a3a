// NEON kernels for aarch64, where Advanced SIMD is part of the base ISA.

#include "xlemb/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace xlemb::detail {
namespace {

constexpr std::size_t kLanes = 2;

void add_neon(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
    for (; i < n; ++i) dst[i] += src[i];
}

void axpy_neon(double* dst, double alpha, const double* x, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) vst1q_f64(dst + i, vfmaq_f64(vld1q_f64(dst + i), a, vld1q_f64(x + i)));
    for (; i < n; ++i) dst[i] = std::fma(alpha, x[i], dst[i]);
}

void sub_neon(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_neon(double* dst, double alpha, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(dst + i), a));
    for (; i < n; ++i) dst[i] *= alpha;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void adagrad_neon(double* w, const double* g, double* acc, double lr, double eps, std::size_t n) {
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t veps = vdupq_n_f64(eps);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float64x2_t vg = vld1q_f64(g + i);
        const float64x2_t va = vfmaq_f64(vld1q_f64(acc + i), vg, vg);
        vst1q_f64(acc + i, va);
        const float64x2_t step = vdivq_f64(vmulq_f64(vlr, vg), vaddq_f64(vsqrtq_f64(va), veps));
        vst1q_f64(w + i, vsubq_f64(vld1q_f64(w + i), step));
    }
    for (; i < n; ++i) {
        acc[i] = std::fma(g[i], g[i], acc[i]);
        w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
}

}  // namespace

const Kernels* neon_kernels() {
    static const Kernels table{Isa::neon,  add_neon, axpy_neon,    sub_neon,
                               scale_neon, dot_neon, sq_dist_neon, adagrad_neon};
    return &table;
}

}  // namespace xlemb::detail

#else

namespace xlemb::detail {
const Kernels* neon_kernels() { return nullptr; }
}  // namespace xlemb::detail

#endif

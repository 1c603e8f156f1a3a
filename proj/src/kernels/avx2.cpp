// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check.

#include "xlemb/kernels.hpp"

#if defined(XLEMB_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace xlemb::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void add_avx2(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
    }
    for (; i < n; ++i) dst[i] += src[i];
}

void axpy_avx2(double* dst, double alpha, const double* x, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(dst + i,
                         _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(dst + i)));
    }
    for (; i < n; ++i) dst[i] = std::fma(alpha, x[i], dst[i]);
}

void sub_avx2(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(out + i,
                         _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_avx2(double* dst, double alpha, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(a, _mm256_loadu_pd(dst + i)));
    }
    for (; i < n; ++i) dst[i] *= alpha;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes),
                               acc1);
    }
    for (; i + kLanes <= n; i += kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 =
            _mm256_sub_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void adagrad_avx2(double* w, const double* g, double* acc, double lr, double eps,
                  std::size_t n) {
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vg = _mm256_loadu_pd(g + i);
        const __m256d va = _mm256_fmadd_pd(vg, vg, _mm256_loadu_pd(acc + i));
        _mm256_storeu_pd(acc + i, va);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(va), veps);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, vg), denom);
        _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), step));
    }
    for (; i < n; ++i) {
        acc[i] = std::fma(g[i], g[i], acc[i]);
        w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels table{Isa::avx2,  add_avx2, axpy_avx2,    sub_avx2,
                               scale_avx2, dot_avx2, sq_dist_avx2, adagrad_avx2};
    return &table;
}

}  // namespace xlemb::detail

#else

namespace xlemb::detail {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace xlemb::detail

#endif

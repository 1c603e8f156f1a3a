#pragma once

// Dense double-precision vector kernels used in every inner loop of training
// and evaluation. Each kernel has a scalar reference implementation and,
// where the target supports it, a SIMD implementation. The active table is
// selected once per process from CPU features; XLEMB_KERNELS=scalar|avx2|neon
// overrides the choice.

#include <cstddef>
#include <string_view>
#include <vector>

namespace xlemb {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct Kernels {
    Isa isa;
    // dst += src
    void (*add)(double* dst, const double* src, std::size_t n);
    // dst += alpha * x
    void (*axpy)(double* dst, double alpha, const double* x, std::size_t n);
    // out = a - b
    void (*sub)(double* out, const double* a, const double* b, std::size_t n);
    // dst *= alpha
    void (*scale)(double* dst, double alpha, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_j (a_j - b_j)^2
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    // acc += g*g; w -= lr * g / (sqrt(acc) + eps)
    void (*adagrad)(double* w, const double* g, double* acc, double lr, double eps,
                    std::size_t n);
};

/// Kernel table chosen for this process.
const Kernels& kernels();

/// Kernel table for a specific ISA. Throws std::runtime_error if the ISA is
/// not compiled in or not supported by the running CPU.
const Kernels& kernels_for(Isa isa);

/// ISAs usable on this machine, scalar first.
std::vector<Isa> available_isas();

namespace detail {
const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when not compiled in
const Kernels* neon_kernels();  // nullptr when not compiled in
}  // namespace detail

}  // namespace xlemb

#include "xlemb/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace xlemb {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return detail::avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
            return detail::neon_kernels() != nullptr;
    }
    return false;
}

const Kernels& select_kernels() {
    if (const char* forced = std::getenv("XLEMB_KERNELS"); forced != nullptr && *forced) {
        const std::string name{forced};
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (isa_name(isa) == name) return kernels_for(isa);
        }
        throw std::runtime_error("XLEMB_KERNELS: unknown kernel set '" + name + "'");
    }
    if (cpu_supports(Isa::avx2)) return *detail::avx2_kernels();
    if (cpu_supports(Isa::neon)) return *detail::neon_kernels();
    return detail::scalar_kernels();
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const Kernels& kernels() {
    static const Kernels& active = select_kernels();
    return active;
}

const Kernels& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw std::runtime_error("kernel set '" + std::string(isa_name(isa)) +
                                 "' is not available on this machine");
    }
    switch (isa) {
        case Isa::avx2: return *detail::avx2_kernels();
        case Isa::neon: return *detail::neon_kernels();
        case Isa::scalar: break;
    }
    return detail::scalar_kernels();
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (cpu_supports(isa)) out.push_back(isa);
    }
    return out;
}

}  // namespace xlemb

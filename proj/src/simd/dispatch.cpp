#include <atomic>
#include <cstdlib>
#include <string_view>

#include "bqmc/simd/kernels.hpp"

namespace bqmc::simd {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Avx512: return "avx512";
    }
    return "unknown";
}

namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
#if defined(__x86_64__) || defined(__i386__)
        case Isa::Avx2:
            return avx2::compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        case Isa::Avx512:
            return avx512::compiled() && __builtin_cpu_supports("avx512f");
#else
        default: return false;
#endif
    }
    return false;
}

Isa initial_isa() {
    if (const char* env = std::getenv("BQMC_ISA")) {
        const std::string_view want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Avx512})
            if (want == isa_name(isa) && cpu_supports(isa)) return isa;
    }
    return detect_isa();
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

Isa detect_isa() {
    if (cpu_supports(Isa::Avx512)) return Isa::Avx512;
    if (cpu_supports(Isa::Avx2)) return Isa::Avx2;
    return Isa::Scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
    if (!cpu_supports(isa)) return false;
    active().store(isa, std::memory_order_relaxed);
    return true;
}

GemmPanelFn gemm_panel_for(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return &avx2::gemm_panel;
        case Isa::Avx512: return &avx512::gemm_panel;
        case Isa::Scalar: break;
    }
    return &scalar::gemm_panel;
}

}  // namespace bqmc::simd

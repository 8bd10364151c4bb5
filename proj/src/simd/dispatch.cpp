#include "dispersio/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace dispersio::simd {

bool cpu_has_avx2() {
#if defined(DISPERSIO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable* detect() {
    const char* env = std::getenv("DISPERSIO_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) {
        return &scalar_kernels();
    }
#if defined(DISPERSIO_HAVE_AVX2)
    if (cpu_has_avx2()) {
        return &avx2_kernels();
    }
#endif
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(const std::string& which) {
    if (which == "scalar") {
        slot().store(&scalar_kernels(), std::memory_order_release);
        return true;
    }
    if (which == "auto") {
        slot().store(detect(), std::memory_order_release);
        return true;
    }
#if defined(DISPERSIO_HAVE_AVX2)
    if (which == "avx2" && cpu_has_avx2()) {
        slot().store(&avx2_kernels(), std::memory_order_release);
        return true;
    }
#endif
    return false;
}

}  // namespace dispersio::simd

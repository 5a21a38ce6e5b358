#include "shelf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace shelf::kernels {

#if SHELF_HAVE_AVX2
const Dispatch* avx2_table();
#endif

const Dispatch* avx2() {
#if SHELF_HAVE_AVX2
    if (__builtin_cpu_supports("avx2")) return avx2_table();
#endif
    return nullptr;
}

const Dispatch& active() {
    static const Dispatch* selected = [] {
        const char* force = std::getenv("SHELF_SIMD");
        if (force && std::strcmp(force, "scalar") == 0) return &scalar();
        if (force && std::strcmp(force, "avx2") == 0 && avx2()) return avx2();
        if (const Dispatch* v = avx2()) return v;
        return &scalar();
    }();
    return *selected;
}

}  // namespace shelf::kernels

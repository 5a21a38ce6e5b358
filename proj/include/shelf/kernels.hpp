#pragma once

#include <cstddef>
#include <cstdint>

namespace shelf::kernels {

// Batched geometry kernels used by the renderer, the voxel labeler and the
// arm collision checks. Rays share a single origin; directions are given as
// SoA arrays and need not be unit length (t is in units of |dir|).
//
// All variants of a kernel are required to produce bit-identical results;
// the files are built with FP contraction off and the AVX2 bodies mirror the
// scalar operation order lane for lane.

struct RayOrigin {
    double x, y, z;
};

struct CylinderParams {
    double cx, cy, z0, z1, radius;
};

struct BoxParams {
    double cx, cy, z0;      // bottom-center
    double cos_yaw, sin_yaw;
    double hx, hy, height;  // half extents in x/y, full extent in z
};

struct ObbParams {
    double cx, cy;
    double cos_yaw, sin_yaw;
    double hx, hy;
    double z_lo, z_hi;
};

struct Dispatch {
    const char* name;

    // Min-update: where the primitive is hit at t < t_io[i], set t_io[i]
    // and id_io[i] = id.
    void (*ray_cylinder_min)(RayOrigin o, const double* dx, const double* dy, const double* dz,
                             size_t n, CylinderParams cyl, double* t_io, int32_t* id_io,
                             int32_t id);
    void (*ray_box_min)(RayOrigin o, const double* dx, const double* dy, const double* dz,
                        size_t n, BoxParams box, double* t_io, int32_t* id_io, int32_t id);

    // True when any point lies within `inflate` of the upright oriented box.
    bool (*points_in_obb_any)(const double* px, const double* py, const double* pz, size_t n,
                              ObbParams obb, double inflate);

    // True when any position has a[i] & b[i] != 0.
    bool (*row_overlap_any)(const uint8_t* a, const uint8_t* b, size_t n);
};

const Dispatch& scalar();

// Null when AVX2 is unavailable on this build/CPU.
const Dispatch* avx2();

// Best available variant; honors SHELF_SIMD=scalar|avx2 (env) for forcing.
const Dispatch& active();

}  // namespace shelf::kernels

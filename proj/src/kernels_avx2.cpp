#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "shelf/kernels.hpp"

// AVX2 variants, 4 doubles per lane group. Operation order matches the
// scalar kernels exactly; no FMA so results stay bit-identical.

namespace shelf::kernels {
namespace {

constexpr double kMinT = 1e-12;

inline __m256d load4(const double* p) { return _mm256_loadu_pd(p); }

void ray_cylinder_min_avx2(RayOrigin o, const double* dx, const double* dy, const double* dz,
                           size_t n, CylinderParams cyl, double* t_io, int32_t* id_io,
                           int32_t id) {
    const double ox = o.x - cyl.cx;
    const double oy = o.y - cyl.cy;
    const double oz = o.z;
    const double r2 = cyl.radius * cyl.radius;
    const double cq = ox * ox + oy * oy - r2;

    const __m256d vox = _mm256_set1_pd(ox), voy = _mm256_set1_pd(oy);
    const __m256d voz = _mm256_set1_pd(oz);
    const __m256d vr2 = _mm256_set1_pd(r2), vcq = _mm256_set1_pd(cq);
    const __m256d vz0 = _mm256_set1_pd(cyl.z0), vz1 = _mm256_set1_pd(cyl.z1);
    const __m256d vmint = _mm256_set1_pd(kMinT);
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vzero = _mm256_setzero_pd();

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vdx = load4(dx + i), vdy = load4(dy + i), vdz = load4(dz + i);
        const __m256d a =
            _mm256_add_pd(_mm256_mul_pd(vdx, vdx), _mm256_mul_pd(vdy, vdy));
        const __m256d b =
            _mm256_add_pd(_mm256_mul_pd(vox, vdx), _mm256_mul_pd(voy, vdy));
        const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(a, vcq));
        const __m256d side_ok = _mm256_and_pd(_mm256_cmp_pd(disc, vzero, _CMP_GE_OQ),
                                              _mm256_cmp_pd(a, vzero, _CMP_GT_OQ));
        const __m256d sq = _mm256_sqrt_pd(disc);
        const __m256d nb = _mm256_sub_pd(vzero, b);
        const __m256d t1 = _mm256_div_pd(_mm256_sub_pd(nb, sq), a);
        const __m256d t2 = _mm256_div_pd(_mm256_add_pd(nb, sq), a);
        const __m256d z1 = _mm256_add_pd(voz, _mm256_mul_pd(t1, vdz));
        const __m256d z2 = _mm256_add_pd(voz, _mm256_mul_pd(t2, vdz));

        __m256d best = load4(t_io + i);
        auto consider_side = [&](__m256d t, __m256d z) {
            __m256d ok = _mm256_and_pd(side_ok, _mm256_cmp_pd(t, vmint, _CMP_GT_OQ));
            ok = _mm256_and_pd(ok, _mm256_cmp_pd(z, vz0, _CMP_GE_OQ));
            ok = _mm256_and_pd(ok, _mm256_cmp_pd(z, vz1, _CMP_LE_OQ));
            ok = _mm256_and_pd(ok, _mm256_cmp_pd(t, best, _CMP_LT_OQ));
            best = _mm256_blendv_pd(best, t, ok);
        };
        consider_side(t1, z1);
        consider_side(t2, z2);

        const __m256d inv_dz = _mm256_div_pd(vone, vdz);
        auto consider_cap = [&](__m256d zc) {
            const __m256d t = _mm256_mul_pd(_mm256_sub_pd(zc, voz), inv_dz);
            const __m256d hx = _mm256_add_pd(vox, _mm256_mul_pd(t, vdx));
            const __m256d hy = _mm256_add_pd(voy, _mm256_mul_pd(t, vdy));
            const __m256d h2 = _mm256_add_pd(_mm256_mul_pd(hx, hx), _mm256_mul_pd(hy, hy));
            __m256d ok = _mm256_cmp_pd(t, vmint, _CMP_GT_OQ);
            ok = _mm256_and_pd(ok, _mm256_cmp_pd(h2, vr2, _CMP_LE_OQ));
            ok = _mm256_and_pd(ok, _mm256_cmp_pd(t, best, _CMP_LT_OQ));
            best = _mm256_blendv_pd(best, t, ok);
        };
        consider_cap(vz0);
        consider_cap(vz1);

        const __m256d cur = load4(t_io + i);
        const __m256d updated = _mm256_cmp_pd(best, cur, _CMP_LT_OQ);
        _mm256_storeu_pd(t_io + i, _mm256_blendv_pd(cur, best, updated));
        const int mask = _mm256_movemask_pd(updated);
        for (int lane = 0; lane < 4; ++lane)
            if (mask & (1 << lane)) id_io[i + lane] = id;
    }
    if (i < n)
        scalar().ray_cylinder_min(o, dx + i, dy + i, dz + i, n - i, cyl, t_io + i, id_io + i, id);
}

void ray_box_min_avx2(RayOrigin o, const double* dx, const double* dy, const double* dz,
                      size_t n, BoxParams box, double* t_io, int32_t* id_io, int32_t id) {
    const double c = box.cos_yaw, s = box.sin_yaw;
    const double wx = o.x - box.cx, wy = o.y - box.cy;
    const double lox = c * wx + s * wy;
    const double loy = -s * wx + c * wy;
    const double loz = o.z - box.z0;

    const __m256d vc = _mm256_set1_pd(c), vs = _mm256_set1_pd(s);
    const __m256d vlox = _mm256_set1_pd(lox), vloy = _mm256_set1_pd(loy),
                  vloz = _mm256_set1_pd(loz);
    const __m256d vhx = _mm256_set1_pd(box.hx), vhy = _mm256_set1_pd(box.hy);
    const __m256d vnhx = _mm256_set1_pd(-box.hx), vnhy = _mm256_set1_pd(-box.hy);
    const __m256d vht = _mm256_set1_pd(box.height);
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vmint = _mm256_set1_pd(kMinT);

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vdx = load4(dx + i), vdy = load4(dy + i), vdz = load4(dz + i);
        const __m256d ldx = _mm256_add_pd(_mm256_mul_pd(vc, vdx), _mm256_mul_pd(vs, vdy));
        const __m256d ldy = _mm256_sub_pd(_mm256_mul_pd(vc, vdy), _mm256_mul_pd(vs, vdx));
        const __m256d ldz = vdz;

        const __m256d ix = _mm256_div_pd(vone, ldx);
        const __m256d iy = _mm256_div_pd(vone, ldy);
        const __m256d iz = _mm256_div_pd(vone, ldz);
        const __m256d tx0 = _mm256_mul_pd(_mm256_sub_pd(vnhx, vlox), ix);
        const __m256d tx1 = _mm256_mul_pd(_mm256_sub_pd(vhx, vlox), ix);
        const __m256d ty0 = _mm256_mul_pd(_mm256_sub_pd(vnhy, vloy), iy);
        const __m256d ty1 = _mm256_mul_pd(_mm256_sub_pd(vhy, vloy), iy);
        const __m256d tz0 = _mm256_mul_pd(_mm256_sub_pd(vzero, vloz), iz);
        const __m256d tz1 = _mm256_mul_pd(_mm256_sub_pd(vht, vloz), iz);

        const __m256d tmin = _mm256_max_pd(
            _mm256_max_pd(_mm256_min_pd(tx0, tx1), _mm256_min_pd(ty0, ty1)),
            _mm256_min_pd(tz0, tz1));
        const __m256d tmax = _mm256_min_pd(
            _mm256_min_pd(_mm256_max_pd(tx0, tx1), _mm256_max_pd(ty0, ty1)),
            _mm256_max_pd(tz0, tz1));

        const __m256d entry_ok = _mm256_cmp_pd(tmin, vmint, _CMP_GT_OQ);
        const __m256d t = _mm256_blendv_pd(tmax, tmin, entry_ok);
        __m256d hit = _mm256_cmp_pd(tmax, tmin, _CMP_GE_OQ);
        hit = _mm256_and_pd(hit, _mm256_cmp_pd(tmax, vmint, _CMP_GT_OQ));

        const __m256d cur = load4(t_io + i);
        const __m256d updated = _mm256_and_pd(hit, _mm256_cmp_pd(t, cur, _CMP_LT_OQ));
        _mm256_storeu_pd(t_io + i, _mm256_blendv_pd(cur, t, updated));
        const int mask = _mm256_movemask_pd(updated);
        for (int lane = 0; lane < 4; ++lane)
            if (mask & (1 << lane)) id_io[i + lane] = id;
    }
    if (i < n)
        scalar().ray_box_min(o, dx + i, dy + i, dz + i, n - i, box, t_io + i, id_io + i, id);
}

bool points_in_obb_any_avx2(const double* px, const double* py, const double* pz, size_t n,
                            ObbParams obb, double inflate) {
    const __m256d vc = _mm256_set1_pd(obb.cos_yaw), vs = _mm256_set1_pd(obb.sin_yaw);
    const __m256d vcx = _mm256_set1_pd(obb.cx), vcy = _mm256_set1_pd(obb.cy);
    const __m256d vhx = _mm256_set1_pd(obb.hx), vhy = _mm256_set1_pd(obb.hy);
    const __m256d vzlo = _mm256_set1_pd(obb.z_lo - inflate);
    const __m256d vzhi = _mm256_set1_pd(obb.z_hi + inflate);
    const __m256d vinf2 = _mm256_set1_pd(inflate * inflate);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d sign_mask = _mm256_set1_pd(-0.0);

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vpx = load4(px + i), vpy = load4(py + i), vpz = load4(pz + i);
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(vpz, vzlo, _CMP_GE_OQ),
                                   _mm256_cmp_pd(vpz, vzhi, _CMP_LE_OQ));
        if (!_mm256_movemask_pd(ok)) continue;
        const __m256d wx = _mm256_sub_pd(vpx, vcx), wy = _mm256_sub_pd(vpy, vcy);
        const __m256d qx = _mm256_add_pd(_mm256_mul_pd(vc, wx), _mm256_mul_pd(vs, wy));
        const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(vc, wy), _mm256_mul_pd(vs, wx));
        const __m256d ox =
            _mm256_max_pd(_mm256_sub_pd(_mm256_andnot_pd(sign_mask, qx), vhx), vzero);
        const __m256d oy =
            _mm256_max_pd(_mm256_sub_pd(_mm256_andnot_pd(sign_mask, qy), vhy), vzero);
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ox, ox), _mm256_mul_pd(oy, oy));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(d2, vinf2, _CMP_LE_OQ));
        if (_mm256_movemask_pd(ok)) return true;
    }
    if (i < n) return scalar().points_in_obb_any(px + i, py + i, pz + i, n - i, obb, inflate);
    return false;
}

bool row_overlap_any_avx2(const uint8_t* a, const uint8_t* b, size_t n) {
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        if (!_mm256_testz_si256(va, vb)) return true;
    }
    if (i < n) return scalar().row_overlap_any(a + i, b + i, n - i);
    return false;
}

}  // namespace

const Dispatch* avx2_table() {
    static const Dispatch table{"avx2", ray_cylinder_min_avx2, ray_box_min_avx2,
                                points_in_obb_any_avx2, row_overlap_any_avx2};
    return &table;
}

}  // namespace shelf::kernels

#endif  // __AVX2__

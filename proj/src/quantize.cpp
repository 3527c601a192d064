#include "cbvh/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbvh {

namespace {

void check_scale(float scale)
{
    int e = 0;
    if (!(scale > 0.0f) || !std::isfinite(scale) || std::frexp(scale, &e) != 0.5f)
        throw std::invalid_argument("quantization scale must be a positive power of two");
}

} // namespace

QuantizedBv quantize_bv(const BoundingVolume& bv, float scale, bool nearest)
{
    check_scale(scale);
    QuantizedBv q;
    q.k = bv.k;
    for (int i = 0; i < bv.slabs(); ++i) {
        const float lo = bv.lo[i] * scale;
        const float hi = bv.hi[i] * scale;
        if (std::abs(lo) > kHalfMax || std::abs(hi) > kHalfMax)
            throw std::range_error("quantize_bv: slab " + std::to_string(i) + " exceeds binary16 range after scaling");
        q.lo[i] = half_encode(lo, nearest ? Rounding::nearest : Rounding::down);
        q.hi[i] = half_encode(hi, nearest ? Rounding::nearest : Rounding::up);
    }
    return q;
}

BoundingVolume dequantize_bv(const QuantizedBv& q, float scale)
{
    check_scale(scale);
    const float inv = 1.0f / scale;
    BoundingVolume bv;
    bv.k = q.k;
    for (int i = 0; i < q.slabs(); ++i) {
        bv.lo[i] = half_decode(q.lo[i]) * inv;
        bv.hi[i] = half_decode(q.hi[i]) * inv;
    }
    return bv;
}

float choose_prescale(const BoundingVolume& bv)
{
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        m = std::max({m, std::abs(static_cast<double>(bv.lo[i])), std::abs(static_cast<double>(bv.hi[i]))});
    if (m == 0.0)
        return 1.0f;
    int e = static_cast<int>(std::floor(std::log2(1024.0 / m)));
    // Guard the floor against log2 rounding either way.
    while (std::ldexp(m, e) > 1024.0)
        --e;
    while (std::ldexp(m, e + 1) <= 1024.0)
        ++e;
    e = std::clamp(e, -60, 60);
    return std::ldexp(1.0f, e);
}

} // namespace cbvh

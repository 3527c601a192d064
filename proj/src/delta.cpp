#include "cbvh/delta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbvh {

namespace {

void check_bits(int bits)
{
    if (bits < kMinResidualBits || bits > kMaxResidualBits)
        throw std::invalid_argument("residual bits must be in [2, 16], got " + std::to_string(bits));
}

float decode_lo(const BoundingVolume& parent, int slab, std::uint32_t q, double step)
{
    return round_down_to_float(static_cast<double>(parent.lo[slab]) + q * step);
}

float decode_hi(const BoundingVolume& parent, int slab, std::uint32_t q, double step)
{
    return round_up_to_float(static_cast<double>(parent.hi[slab]) - q * step);
}

} // namespace

double residual_step(const BoundingVolume& parent, int slab, int bits)
{
    const double extent = static_cast<double>(parent.hi[slab]) - static_cast<double>(parent.lo[slab]);
    return extent / static_cast<double>((1u << bits) - 1u);
}

DeltaCode encode_delta(const BoundingVolume& child, const BoundingVolume& parent_decoded, int bits)
{
    check_bits(bits);
    if (child.k != parent_decoded.k)
        throw AxisSetMismatch(child.k, parent_decoded.k);
    if (!parent_decoded.contains(child))
        throw std::invalid_argument("encode_delta: child volume is not inside the parent");

    const std::uint32_t qmax = (1u << bits) - 1u;
    DeltaCode code;
    code.k = child.k;
    for (int i = 0; i < child.slabs(); ++i) {
        const double step = residual_step(parent_decoded, i, bits);
        if (step <= 0.0)
            continue;
        const double plo = parent_decoded.lo[i];
        const double phi = parent_decoded.hi[i];

        // Floor in double, then repair the one-step ambiguity introduced by
        // rounding so that the decoder's float result stays outside the child.
        auto q_lo = static_cast<std::uint32_t>(std::min<double>(qmax, std::floor((child.lo[i] - plo) / step)));
        while (q_lo > 0 && decode_lo(parent_decoded, i, q_lo, step) > child.lo[i])
            --q_lo;
        while (q_lo < qmax && decode_lo(parent_decoded, i, q_lo + 1, step) <= child.lo[i])
            ++q_lo;

        auto q_hi = static_cast<std::uint32_t>(std::min<double>(qmax, std::floor((phi - child.hi[i]) / step)));
        while (q_hi > 0 && decode_hi(parent_decoded, i, q_hi, step) < child.hi[i])
            --q_hi;
        while (q_hi < qmax && decode_hi(parent_decoded, i, q_hi + 1, step) >= child.hi[i])
            ++q_hi;

        code.q_lo[i] = static_cast<std::uint16_t>(q_lo);
        code.q_hi[i] = static_cast<std::uint16_t>(q_hi);
    }
    return code;
}

BoundingVolume decode_delta(const DeltaCode& code, const BoundingVolume& parent_decoded, int bits)
{
    check_bits(bits);
    if (code.k != parent_decoded.k)
        throw AxisSetMismatch(code.k, parent_decoded.k);
    BoundingVolume bv;
    bv.k = parent_decoded.k;
    for (int i = 0; i < bv.slabs(); ++i) {
        const double step = residual_step(parent_decoded, i, bits);
        if (step <= 0.0) {
            bv.lo[i] = parent_decoded.lo[i];
            bv.hi[i] = parent_decoded.hi[i];
            continue;
        }
        bv.lo[i] = decode_lo(parent_decoded, i, code.q_lo[i], step);
        bv.hi[i] = decode_hi(parent_decoded, i, code.q_hi[i], step);
    }
    return bv;
}

std::size_t delta_code_bytes(int k, int bits) { return (static_cast<std::size_t>(k) * bits + 7) / 8; }

void pack_delta(const DeltaCode& code, int bits, std::span<std::uint8_t> out)
{
    const std::size_t need = delta_code_bytes(code.k, bits);
    if (out.size() < need)
        throw std::invalid_argument("pack_delta: output too small");
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(need), std::uint8_t{0});
    std::size_t bit = 0;
    auto put = [&](std::uint32_t v) {
        for (int b = 0; b < bits; ++b, ++bit)
            if (v & (1u << b))
                out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    };
    for (int i = 0; i < code.slabs(); ++i)
        put(code.q_lo[i]);
    for (int i = 0; i < code.slabs(); ++i)
        put(code.q_hi[i]);
}

DeltaCode unpack_delta(std::span<const std::uint8_t> in, int k, int bits)
{
    if (in.size() < delta_code_bytes(k, bits))
        throw std::invalid_argument("unpack_delta: input too small");
    DeltaCode code;
    code.k = static_cast<std::uint8_t>(k);
    if (bits == 8) {
        for (int i = 0; i < code.slabs(); ++i) {
            code.q_lo[i] = in[i];
            code.q_hi[i] = in[code.slabs() + i];
        }
        return code;
    }
    std::size_t bit = 0;
    auto get = [&]() {
        std::uint32_t v = 0;
        for (int b = 0; b < bits; ++b, ++bit)
            if (in[bit / 8] & (1u << (bit % 8)))
                v |= 1u << b;
        return static_cast<std::uint16_t>(v);
    };
    for (int i = 0; i < code.slabs(); ++i)
        code.q_lo[i] = get();
    for (int i = 0; i < code.slabs(); ++i)
        code.q_hi[i] = get();
    return code;
}

} // namespace cbvh

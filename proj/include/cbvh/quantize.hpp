#pragma once

#include <array>
#include <cstdint>

#include "cbvh/bounding_volume.hpp"
#include "cbvh/half.hpp"

namespace cbvh {

/// Half-precision k-DOP. In conservative mode lo is rounded down and hi up,
/// so the decoded volume contains the source.
struct QuantizedBv {
    std::uint8_t k = 6;
    std::array<Half, kMaxSlabs> lo{};
    std::array<Half, kMaxSlabs> hi{};

    int slabs() const noexcept { return k / 2; }
};

/// `scale` is a power of two applied before encoding (and divided out on
/// decode), which is exact. Throws std::range_error if a scaled value
/// exceeds the finite binary16 range.
QuantizedBv quantize_bv(const BoundingVolume& bv, float scale = 1.0f, bool nearest = false);
BoundingVolume dequantize_bv(const QuantizedBv& q, float scale = 1.0f);

/// Power of two s such that s * |value| <= 1024 for the largest coordinate of
/// the AABB slabs of `bv` (1 for an all-zero volume).
float choose_prescale(const BoundingVolume& bv);

} // namespace cbvh

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "cbvh/bounding_volume.hpp"

namespace cbvh {

/// Corrector for a child volume predicted as its parent's decoded volume:
/// per slab, how many parent steps the child's lo rises and hi falls.
struct DeltaCode {
    std::uint8_t k = 6;
    std::array<std::uint16_t, kMaxSlabs> q_lo{};
    std::array<std::uint16_t, kMaxSlabs> q_hi{};

    int slabs() const noexcept { return k / 2; }
    friend bool operator==(const DeltaCode& a, const DeltaCode& b)
    {
        if (a.k != b.k)
            return false;
        for (int i = 0; i < a.slabs(); ++i)
            if (a.q_lo[i] != b.q_lo[i] || a.q_hi[i] != b.q_hi[i])
                return false;
        return true;
    }
};

inline constexpr int kMinResidualBits = 2;
inline constexpr int kMaxResidualBits = 16;

/// Parent extent on slab i divided into 2^bits - 1 steps.
double residual_step(const BoundingVolume& parent, int slab, int bits);

/// Floor-quantized residuals, so the decoded child always contains `child`.
/// Throws std::invalid_argument if child is not inside parent or bits is
/// outside [2, 16].
DeltaCode encode_delta(const BoundingVolume& child, const BoundingVolume& parent_decoded, int bits);

BoundingVolume decode_delta(const DeltaCode& code, const BoundingVolume& parent_decoded, int bits);

/// Bytes for one packed code: k residuals of `bits` bits each.
std::size_t delta_code_bytes(int k, int bits);

/// LSB-first bit packing of q_lo[0..k/2) then q_hi[0..k/2).
void pack_delta(const DeltaCode& code, int bits, std::span<std::uint8_t> out);
DeltaCode unpack_delta(std::span<const std::uint8_t> in, int k, int bits);

} // namespace cbvh

#pragma once

#include <cstdint>

namespace cbvh {

enum class Rounding : std::uint8_t { down, up, nearest };

/// IEEE 754 binary16 bit pattern.
struct Half {
    std::uint16_t bits = 0;
    friend constexpr bool operator==(Half, Half) = default;
};

inline constexpr float kHalfMax = 65504.0f;

/// Converts to binary16 with the given rounding direction (nearest is
/// ties-to-even). Subnormals are produced; overflow goes to infinity when
/// rounding away from zero and saturates at +-65504 when rounding toward it.
/// Throws std::invalid_argument on NaN.
Half half_encode(float x, Rounding mode);

/// Exact widening to float32.
float half_decode(Half h);

} // namespace cbvh

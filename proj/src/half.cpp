#include "cbvh/half.hpp"

#include <cmath>
#include <stdexcept>

namespace cbvh {

Half half_encode(float x, Rounding mode)
{
    if (std::isnan(x))
        throw std::invalid_argument("half_encode: NaN input");
    const bool negative = std::signbit(x);
    const std::uint16_t sign = negative ? 0x8000 : 0x0000;
    const double a = std::abs(static_cast<double>(x));
    if (a == 0.0)
        return {sign};
    if (std::isinf(a))
        return {static_cast<std::uint16_t>(sign | 0x7C00)};

    // Magnitude truncated toward zero, plus the discarded fraction in units
    // of the last place.
    std::uint16_t magnitude = 0;
    double remainder = 0.0;
    if (a >= 65536.0) {
        // Beyond the last binade: nearest and away-from-zero both overflow.
        magnitude = 0x7BFF;
        remainder = 1.0;
    } else {
        int e = 0;
        std::frexp(a, &e);
        const int exponent = e - 1; // a in [2^exponent, 2^(exponent+1))
        if (exponent < -14) {
            const double m = std::ldexp(a, 24);
            const double q = std::floor(m);
            magnitude = static_cast<std::uint16_t>(q);
            remainder = m - q;
        } else {
            const double m = std::ldexp(a, 10 - exponent);
            const double q = std::floor(m);
            magnitude = static_cast<std::uint16_t>(((exponent + 15) << 10) | (static_cast<int>(q) - 1024));
            remainder = m - q;
        }
    }

    if (remainder > 0.0) {
        bool bump = false;
        switch (mode) {
        case Rounding::down:
            bump = negative;
            break;
        case Rounding::up:
            bump = !negative;
            break;
        case Rounding::nearest:
            bump = remainder > 0.5 || (remainder == 0.5 && (magnitude & 1u));
            break;
        }
        // Incrementing the pattern carries mantissa overflow into the
        // exponent, and 0x7BFF + 1 is infinity.
        if (bump)
            ++magnitude;
    }
    return {static_cast<std::uint16_t>(sign | magnitude)};
}

float half_decode(Half h)
{
    const bool negative = (h.bits & 0x8000u) != 0;
    const int exponent = (h.bits >> 10) & 0x1F;
    const int mantissa = h.bits & 0x3FF;
    float value = 0.0f;
    if (exponent == 0)
        value = std::ldexp(static_cast<float>(mantissa), -24);
    else if (exponent == 31)
        value = mantissa == 0 ? INFINITY : NAN;
    else
        value = std::ldexp(static_cast<float>(1024 + mantissa), exponent - 25);
    return negative ? -value : value;
}

} // namespace cbvh

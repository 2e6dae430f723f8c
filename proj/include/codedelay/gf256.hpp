#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace codedelay::gf256 {

/// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B).
inline constexpr unsigned kPolynomial = 0x11B;

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
/// Multiplicative inverse; a must be nonzero.
std::uint8_t inv(std::uint8_t a);
std::uint8_t div(std::uint8_t a, std::uint8_t b);

/// Carry-less shift-and-reduce multiply, independent of the lookup tables.
std::uint8_t mul_reference(std::uint8_t a, std::uint8_t b);

/// dst[i] ^= c * src[i].
void axpy(std::span<std::uint8_t> dst, std::uint8_t c, std::span<const std::uint8_t> src);
/// dst[i] = c * dst[i].
void scale(std::span<std::uint8_t> dst, std::uint8_t c);

}  // namespace codedelay::gf256

#include "codedelay/gf256.hpp"

#include <array>

#include "codedelay/error.hpp"

namespace codedelay::gf256 {
namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};  // doubled so exp[log a + log b] needs no modulo
  std::array<int, 256> log{};
};

constexpr Tables make_tables() {
  Tables t;
  unsigned x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = i;
    // multiply by the generator 0x03 = x + 1
    unsigned next = (x << 1) ^ x;
    if (next & 0x100) next ^= kPolynomial;
    x = next;
  }
  for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

constexpr Tables kTables = make_tables();

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[kTables.log[a] + kTables.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw InvalidArgument("zero has no inverse in GF(2^8)");
  return kTables.exp[255 - kTables.log[a]];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) {
  if (b == 0) throw InvalidArgument("division by zero in GF(2^8)");
  if (a == 0) return 0;
  return kTables.exp[kTables.log[a] + 255 - kTables.log[b]];
}

std::uint8_t mul_reference(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  unsigned x = a;
  for (unsigned y = b; y != 0; y >>= 1) {
    if (y & 1u) acc ^= x;
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  return static_cast<std::uint8_t>(acc);
}

void axpy(std::span<std::uint8_t> dst, std::uint8_t c, std::span<const std::uint8_t> src) {
  if (dst.size() != src.size()) throw InvalidArgument("axpy length mismatch");
  if (c == 0) return;
  if (c == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
    return;
  }
  const int lc = kTables.log[c];
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (src[i] != 0) dst[i] ^= kTables.exp[lc + kTables.log[src[i]]];
  }
}

void scale(std::span<std::uint8_t> dst, std::uint8_t c) {
  if (c == 1) return;
  if (c == 0) {
    for (auto& v : dst) v = 0;
    return;
  }
  const int lc = kTables.log[c];
  for (auto& v : dst) {
    if (v != 0) v = kTables.exp[lc + kTables.log[v]];
  }
}

}  // namespace codedelay::gf256

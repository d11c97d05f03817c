#include "robust/rng.hpp"

namespace robust {

BigInt CounterRng::uniform_below(const BigInt& bound) {
  if (bound <= 0) throw DomainError("uniform_below: bound must be positive");
  if (bound <= std::numeric_limits<std::uint64_t>::max())
    return BigInt(uniform_below(bound.convert_to<std::uint64_t>()));
  const BigInt top = bound - 1;
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(top)) + 1;
  const unsigned words = (bits + 63) / 64;
  const unsigned spare = words * 64 - bits;
  for (;;) {
    BigInt candidate = 0;
    for (unsigned w = 0; w < words; ++w) {
      candidate <<= 64;
      candidate |= next_u64();
    }
    candidate >>= spare;
    if (candidate < bound) return candidate;
  }
}

}  // namespace robust

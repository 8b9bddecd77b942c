#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace pzl {

// splitmix64 step; also used as the keyed mixer for stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

// FNV-1a over bytes; used for content hashing (files, pools, directories).
inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t len,
                                   std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64_bytes(s.data(), s.size(), seed);
}

// xoshiro256** with explicit, platform-independent bounded draws.
// <random> distributions are not bit-stable across standard libraries, so all
// sampling helpers live here and are part of the determinism contract.
class RandomStream {
 public:
  RandomStream() : RandomStream(0) {}

  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased draw in [0, bound) via rejection on the top bits.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Inclusive integer range.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_below(span));
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

  // Uniform double in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(T* data, std::size_t n) {
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(data[i - 1], data[j]);
    }
  }

  template <typename Container>
  void shuffle(Container& c) {
    shuffle(c.data(), c.size());
  }

  // Derives an independent child stream; consuming the child does not
  // advance this stream.
  RandomStream fork(std::uint64_t tag) const {
    return RandomStream(mix64(mix64(state_[0], state_[2]) ^ state_[3], tag));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace pzl

#pragma once

#include <cstdint>
#include <string_view>

namespace allab {

// splitmix64 (Steele & Vigna). Used for seeding and for stateless keyed draws.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  return splitmix64(x);
}

// FNV-1a over the tag bytes; turns a purpose tag into key material.
inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// xoshiro256++ (Blackman & Vigna, public domain). All state transitions are
// 64-bit integer ops, so sequences are identical across platforms.
class RngStream {
 public:
  RngStream() : RngStream(0x853C49E6748FEA9BULL) {}

  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_u01() < p; }

  double uniform(double a, double b) { return a + (b - a) * next_u01(); }

  // Uniform integer in [0, n). Multiply-shift; bias is at most n * 2^-64 and
  // exactly one draw is consumed per call, which keeps streams alignable.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Deterministic stream derivation: identical (master_seed, replicate, tag)
// triples yield identical streams; distinct triples yield independent ones.
// Instrumentation can add new tags without perturbing existing streams.
struct RngContract {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;

  std::uint64_t key(std::string_view tag) const {
    std::uint64_t k = mix64(master_seed ^ 0x2545F4914F6CDD1DULL);
    k = mix64(k ^ (replicate + 0x9E3779B97F4A7C15ULL));
    k = mix64(k ^ hash_tag(tag));
    return k;
  }

  RngStream stream(std::string_view tag) const { return RngStream(key(tag)); }
};

// Stateless per-index uniform; lets a large table of hidden draws be a pure
// function of (key, index) instead of stored state.
inline double keyed_u01(std::uint64_t key, std::uint64_t index) {
  return static_cast<double>(
             mix64(key ^ mix64(index + 0x632BE59BD9B4E019ULL)) >> 11) *
         0x1.0p-53;
}

}  // namespace allab

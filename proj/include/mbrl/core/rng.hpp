#pragma once

#include <cstdint>

namespace mbrl {

// Hierarchical deterministic RNG. A stream is identified by a 64-bit key;
// split(id) derives an independent child key without consuming any draws, so
// stream assignment (per seed, episode, plan step, candidate, particle, ...)
// is a pure function of the path from the master seed. Draws come from a
// counter-keyed SplitMix64 generator with hand-rolled uniform and normal
// transforms: construction is free (16 bytes of state), sequences are
// bit-identical across platforms, and results never depend on how work is
// scheduled across threads. Not cryptographic.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::uint64_t stream_id) const;

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();  // N(0, 1)
  std::uint64_t uniform_int(std::uint64_t n);  // [0, n)

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace mbrl

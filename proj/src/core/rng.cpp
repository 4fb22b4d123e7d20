#include "mbrl/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace mbrl {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed + kGamma)) {}

RngStream RngStream::split(std::uint64_t stream_id) const {
  RngStream child(0);
  // Child keys live in a different mixing orbit than draw states.
  child.key_ = mix64((key_ ^ 0x5851f42d4c957f2dULL) + kGamma * (stream_id + 1));
  child.counter_ = 0;
  child.has_cached_normal_ = false;
  return child;
}

std::uint64_t RngStream::next_u64() {
  counter_ += kGamma;
  return mix64(key_ + counter_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection above the largest multiple of n representable, no modulo bias.
  const std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

}  // namespace mbrl

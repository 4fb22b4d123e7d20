#pragma once

#include <cstdint>

namespace mbrl::streams {

// Fixed tags for hierarchical RNG stream derivation. Assignment is by path
// (master -> seed run -> episode -> plan step -> candidate), never by worker,
// so results do not depend on scheduling or worker count.
inline constexpr std::uint64_t kSeedRun = 1;
inline constexpr std::uint64_t kEpisode = 2;
inline constexpr std::uint64_t kReset = 3;
inline constexpr std::uint64_t kNoise = 4;
inline constexpr std::uint64_t kPlanStep = 5;
inline constexpr std::uint64_t kCandidate = 6;
inline constexpr std::uint64_t kTrain = 7;
inline constexpr std::uint64_t kWarmup = 8;
inline constexpr std::uint64_t kMember = 9;
inline constexpr std::uint64_t kExtra = 10;
inline constexpr std::uint64_t kInit = 11;
inline constexpr std::uint64_t kShuffle = 12;
inline constexpr std::uint64_t kHoldout = 13;
inline constexpr std::uint64_t kRestart = 14;
inline constexpr std::uint64_t kEval = 15;
inline constexpr std::uint64_t kParticle = 16;

}  // namespace mbrl::streams

#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace bivamp {

// Stream identifiers. Every random quantity of a trial is drawn from its own
// engine, seeded by mixing the trial seed with one of these tags, so adding
// draws to one stream never shifts another.
enum class Stream : std::uint64_t {
  kFactorU = 1,
  kFactorV = 2,
  kNoise = 3,
  kMask = 4,
  kSolverInit = 5,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of `stream` for the given base seed and restart index.
std::uint64_t stream_seed(std::uint64_t seed, Stream stream,
                          std::uint64_t index = 0);

// Boost engines and distributions are specified algorithmically, so draws are
// identical on every platform for the same Boost version.
using Engine = boost::random::mt19937_64;

Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

}  // namespace bivamp

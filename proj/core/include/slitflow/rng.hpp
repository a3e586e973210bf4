#pragma once

#include <cstdint>
#include <random>

namespace slitflow::rng {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream seed for one path of an ensemble.
std::uint64_t path_seed(std::uint64_t master, std::uint64_t path_id);

/// Seed for a named sub-stream (field vs flow, etc.) of one path.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard normal that depends only on the key; used for bridge refinement.
double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Generator type used everywhere a sequential stream is needed.
using Engine = std::mt19937_64;

/// Standard normal drawn from an engine with a fixed, portable transform.
///
/// std::normal_distribution is implementation defined; this Marsaglia polar
/// variant makes the byte stream independent of the standard library.
class Normal {
 public:
  double operator()(Engine& eng);

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform in (0,1) with 53 random bits.
double uniform01(Engine& eng);

}  // namespace slitflow::rng

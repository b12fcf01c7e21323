#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace mobgen {

std::uint64_t fnv1a64(std::string_view bytes);

/// Counter-based deterministic random stream keyed by (seed, agent_id,
/// day_index). Equal keys give byte-identical draw sequences on every
/// platform, so population-level parallelism cannot perturb an agent's draws.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::string_view agent_id, int day_index);
  explicit RngStream(std::uint64_t raw_state);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  bool bernoulli(double p);

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  /// Index draw from a probability vector (assumed to sum to ~1).
  std::size_t categorical(std::span<const double> probabilities);

private:
  std::uint64_t state_;
};

}  // namespace mobgen

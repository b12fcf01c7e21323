#include "mobgen/rng.hpp"

#include <stdexcept>

namespace mobgen {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::string_view agent_id, int day_index)
    : state_(mix64(mix64(seed) ^ mix64(fnv1a64(agent_id) + kGamma * static_cast<std::uint64_t>(day_index + 1)))) {}

RngStream::RngStream(std::uint64_t raw_state) : state_(raw_state) {}

std::uint64_t RngStream::next_u64() {
  // splitmix64
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

int RngStream::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

std::size_t RngStream::categorical(std::span<const double> probabilities) {
  const double u = uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cum += probabilities[i];
    if (u < cum) return i;
  }
  return probabilities.empty() ? 0 : probabilities.size() - 1;
}

}  // namespace mobgen

#include "jcaco/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace jcaco {
namespace {

constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;  // 2^64 / golden ratio

// splitmix64 finalizer: a strong 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fold(std::uint64_t state, std::uint64_t label) {
  return mix64(state ^ mix64(label + kPhi));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : state_(mix64(seed ^ kPhi)) {}

RngStream RngStream::from(std::uint64_t root, std::initializer_list<std::uint64_t> labels) {
  RngStream s(root);
  for (std::uint64_t l : labels) s.state_ = fold(s.state_, l);
  return s;
}

RngStream RngStream::sub(std::uint64_t label) const {
  RngStream s;
  s.state_ = fold(state_, label);
  return s;
}

std::uint64_t RngStream::next_u64() {
  state_ += kPhi;  // splitmix64 sequence step
  return mix64(state_);
}

double RngStream::uniform01() {
  // 53 random mantissa bits -> [0, 1) on an even grid.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("uniform: lo > hi");
  if (lo == hi) {
    next_u64();  // keep the draw count stable regardless of range degeneracy
    return lo;
  }
  return lo + uniform01() * (hi - lo);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n == 0");
  // Multiply-shift map of a full 64-bit draw onto {0..n-1}; the O(2^-64)
  // bias is irrelevant here and the result is platform-stable.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

int RngStream::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  return lo + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double RngStream::exponential(double mean) {
  if (!(mean > 0.0)) throw std::domain_error("exponential: mean must be positive");
  // u in [0,1) so log1p(-u) is finite.
  return -mean * std::log1p(-uniform01());
}

bool RngStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("bernoulli: p outside [0, 1]");
  return uniform01() < p;
}

}  // namespace jcaco

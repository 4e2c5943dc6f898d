#pragma once

// Counter-derived deterministic random streams.
//
// A stream is identified by a root seed plus a label path (purpose, indices
// such as iteration and UE). Equal (seed, labels) always yield the same draw
// sequence, independent of thread scheduling or evaluation order, which is
// what makes simulation outputs reproducible byte-for-byte.

#include <cstdint>
#include <initializer_list>

namespace jcaco {

// Label vocabulary for derived streams. Values are arbitrary but frozen:
// changing them changes every downstream random sequence.
namespace stream_label {
inline constexpr std::uint64_t kScenarioDraw = 1;
inline constexpr std::uint64_t kActivity = 2;
inline constexpr std::uint64_t kFading = 3;
inline constexpr std::uint64_t kMobility = 4;
inline constexpr std::uint64_t kInitAction = 5;
inline constexpr std::uint64_t kAction = 6;
inline constexpr std::uint64_t kTrialProfile = 7;
inline constexpr std::uint64_t kTrialDeviation = 8;
inline constexpr std::uint64_t kInstance = 9;
inline constexpr std::uint64_t kDrift = 10;
inline constexpr std::uint64_t kBaseline = 11;
inline constexpr std::uint64_t kAccessGame = 12;
inline constexpr std::uint64_t kComputeGame = 13;
}  // namespace stream_label

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Stream for (root, labels...). Distinct label paths give statistically
  // independent streams.
  static RngStream from(std::uint64_t root, std::initializer_list<std::uint64_t> labels);

  // Child stream derived from this stream's identity plus one more label.
  RngStream sub(std::uint64_t label) const;

  std::uint64_t next_u64();

  double uniform01();                      // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi); lo == hi returns lo
  std::uint64_t uniform_below(std::uint64_t n);  // {0, ..., n-1}, n >= 1
  int uniform_int(int lo, int hi);         // inclusive bounds
  double exponential(double mean);         // mean > 0
  bool bernoulli(double p);                // p in [0, 1]; p == 1 always true

 private:
  RngStream() = default;
  std::uint64_t state_ = 0;
};

}  // namespace jcaco

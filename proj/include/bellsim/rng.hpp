#pragma once

#include <array>
#include <cstdint>

namespace bellsim {

// Pipeline stage labels for stream derivation. Each (seed, run, stage) triple
// names an independent stream, so runs can be generated in any order or in
// parallel and still be bit-identical.
enum class Stage : std::uint64_t {
  Settings = 0,
  Lambda = 1,
  Microstates = 2,
  RespondA = 3,
  RespondB = 4,
};

// xoshiro256** with splitmix64 seeding. Small, fast, and good enough for
// statistical simulation; not cryptographic.
class RngStream {
 public:
  RngStream() : RngStream(0, 0, Stage::Lambda) {}
  RngStream(std::uint64_t master_seed, std::uint64_t run_index, Stage stage);

  std::uint64_t next_u64();
  // Uniform double in [0, 1), 53-bit resolution.
  double next_unit();
  double next_range(double lo, double hi);
  // Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t next_below(std::uint64_t n);

  std::array<std::uint64_t, 4> state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_;
};

// Hash-split stream derivation: collision-resistant mixing of
// (master_seed, run_index, stage) into an independent generator state.
RngStream derive_rng_stream(std::uint64_t master_seed, std::uint64_t run_index,
                            Stage stage);

}  // namespace bellsim

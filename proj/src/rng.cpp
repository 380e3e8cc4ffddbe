#include "bellsim/rng.hpp"

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t run_index,
                     Stage stage) {
  // Fold the triple into a splitmix64 state, then expand to four words.
  std::uint64_t s = mix64(master_seed + kGolden);
  s = mix64(s ^ (run_index + kGolden));
  s = mix64(s ^ (static_cast<std::uint64_t>(stage) + kGolden));
  for (auto& w : s_) {
    s += kGolden;
    w = mix64(s);
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_range(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("next_below(0)");
  // Rejection sampling to stay unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

RngStream derive_rng_stream(std::uint64_t master_seed, std::uint64_t run_index,
                            Stage stage) {
  return RngStream(master_seed, run_index, stage);
}

}  // namespace bellsim

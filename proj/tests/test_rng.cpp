#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "bellsim/rng.hpp"

namespace {

using bellsim::RngStream;
using bellsim::Stage;
using bellsim::derive_rng_stream;

std::array<std::uint64_t, 4> take4(RngStream& s) {
  return {s.next_u64(), s.next_u64(), s.next_u64(), s.next_u64()};
}

}  // namespace

// Golden values computed with a reference implementation of
// splitmix64 + xoshiro256** outside this library. They pin the exact
// stream-derivation scheme: any change to seeding or the generator core
// silently breaks reproducibility of archived data, so these must never
// be "updated to match".
TEST_CASE("stream derivation matches frozen reference outputs") {
  {
    RngStream s = derive_rng_stream(0, 0, Stage::Lambda);
    const std::array<std::uint64_t, 4> expected = {
        0x4F4E5C274C0C839Bull, 0x0983E1FFC63F11C8ull,
        0x5359A6FE63E8F459ull, 0x3B85835FFD9185E2ull};
    CHECK(take4(s) == expected);
  }
  {
    RngStream s = derive_rng_stream(42, 7, Stage::RespondA);
    const std::array<std::uint64_t, 4> expected = {
        0x54E9F9871FD8F259ull, 0xED9165EC6B3E70E4ull,
        0xE601F47F81D0B9E0ull, 0x6B4D2A30FFC8E6FEull};
    CHECK(take4(s) == expected);
  }
  {
    RngStream s = derive_rng_stream(0xDEADBEEFull, 123456, Stage::Settings);
    const std::array<std::uint64_t, 4> expected = {
        0x930DD36BB1620B74ull, 0xF7FE397E145E3481ull,
        0xDD2F9D4E93414BE1ull, 0xE4279F18E7F05D32ull};
    CHECK(take4(s) == expected);
  }
}

TEST_CASE("next_unit matches frozen reference outputs") {
  RngStream s = derive_rng_stream(1, 2, Stage::RespondB);
  CHECK(s.next_unit() == doctest::Approx(0.06996309818997393).epsilon(1e-15));
  CHECK(s.next_unit() == doctest::Approx(0.13789263246307415).epsilon(1e-15));
  CHECK(s.next_unit() == doctest::Approx(0.4505357820714).epsilon(1e-12));
}

TEST_CASE("identical triples give identical streams") {
  RngStream a = derive_rng_stream(99, 5, Stage::Microstates);
  RngStream b = derive_rng_stream(99, 5, Stage::Microstates);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct triples give distinct states") {
  std::set<std::array<std::uint64_t, 4>> seen;
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    for (std::uint64_t run : {0ull, 1ull, 2ull, 1000000ull}) {
      for (auto stage : {Stage::Settings, Stage::Lambda, Stage::Microstates,
                         Stage::RespondA, Stage::RespondB}) {
        seen.insert(derive_rng_stream(seed, run, stage).state());
      }
    }
  }
  CHECK(seen.size() == 3u * 4u * 5u);
}

TEST_CASE("copying a stream forks deterministically") {
  RngStream a = derive_rng_stream(7, 3, Stage::Lambda);
  (void)a.next_u64();
  RngStream b = a;
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_unit() == b.next_unit());
}

TEST_CASE("next_unit stays in [0, 1)") {
  RngStream s = derive_rng_stream(3, 0, Stage::Lambda);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_range covers the requested interval") {
  RngStream s = derive_rng_stream(4, 0, Stage::Lambda);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10000; ++i) {
    const double v = s.next_range(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < -1.9);
  CHECK(hi > 2.9);
}

TEST_CASE("next_below is in range and roughly uniform") {
  RngStream s = derive_rng_stream(5, 0, Stage::Settings);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = s.next_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  // Expected 10000 per bucket; 5 sigma is ~480.
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(s.next_below(1) == 0);
}

TEST_CASE("unit draws have unbiased mean") {
  RngStream s = derive_rng_stream(6, 0, Stage::Lambda);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += s.next_unit();
  // sd of the mean is 1/sqrt(12 n) ~ 9.1e-4; allow 5 sigma.
  CHECK(std::abs(sum / n - 0.5) < 5e-3);
}

#include <cmath>
#include <set>

#include "codedelay/rng.hpp"
#include "doctest.h"

using codedelay::CounterRng;

TEST_CASE("first output matches reference SplitMix64") {
  CounterRng rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.next() == 0x06c45d188009454fULL);
}

TEST_CASE("same key gives the same stream") {
  auto a = CounterRng::derive(42, 1);
  auto b = CounterRng::derive(42, 1);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("streams and replications get distinct keys") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::uint64_t s = 0; s < 5; ++s) keys.insert(CounterRng::derive(seed, s).key());
    keys.insert(codedelay::derive_seed(seed, 0));
    keys.insert(codedelay::derive_seed(seed, 1));
  }
  CHECK(keys.size() == 20 * 7);
}

TEST_CASE("uniform draws are in [0, 1) with the right mean") {
  auto rng = CounterRng::derive(7, 1);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double se = std::sqrt(1.0 / 12.0 / n);
  CHECK(std::abs(sum / n - 0.5) < 4 * se);
}

TEST_CASE("bernoulli frequency") {
  auto rng = CounterRng::derive(9, 1);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.1);
  CHECK(std::abs(hits / double(n) - 0.1) < 4 * std::sqrt(0.09 / n));
}

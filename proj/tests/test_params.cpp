#include <cmath>

#include "codedelay/error.hpp"
#include "codedelay/params.hpp"
#include "doctest.h"

using namespace codedelay;

TEST_CASE("derive_channel worked examples") {
  const auto a = derive_channel(0.1, 10e6, 10000, 0.0495);
  CHECK(a.t_s == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(a.rtt == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(a.bdp == 100);

  const auto unit = derive_channel(0.0, 1, 1, 0.0);
  CHECK(unit.t_s == 1.0);
  CHECK(unit.rtt == 1.0);
  CHECK(unit.bdp == 1);

  const auto c = derive_channel(0.1, 25e6, 12000, 0.02976);
  CHECK(c.rtt == doctest::Approx(0.06).epsilon(1e-9));
}

TEST_CASE("derive_channel_from_rtt solves the propagation delay") {
  const auto ch = derive_channel_from_rtt(0.1, 10e6, 10000, 0.1);
  CHECK(ch.t_p == doctest::Approx(0.0495).epsilon(1e-12));
  CHECK(ch.bdp == 100);
  CHECK_THROWS_AS(derive_channel_from_rtt(0.1, 10e6, 10000, 0.0001), InvalidArgument);
}

TEST_CASE("channel parameters are validated") {
  CHECK_THROWS_AS(derive_channel(1.0, 1e6, 1000, 0.01), InvalidArgument);
  CHECK_THROWS_AS(derive_channel(-0.1, 1e6, 1000, 0.01), InvalidArgument);
  CHECK_THROWS_AS(derive_channel(0.1, 0.0, 1000, 0.01), InvalidArgument);
  CHECK_THROWS_AS(derive_channel(0.1, 1e6, -5, 0.01), InvalidArgument);
  CHECK_THROWS_AS(derive_channel(0.1, 1e6, 1000, -0.01), InvalidArgument);
  CHECK_THROWS_AS(derive_channel(std::nan(""), 1e6, 1000, 0.01), InvalidArgument);
}

TEST_CASE("bdp covers one round trip at every scale") {
  for (double rate : {1e3, 1e6, 25e6, 1e9}) {
    for (double bits : {8.0, 1500.0 * 8, 12000.0}) {
      for (double tp : {0.0, 1e-4, 0.01, 0.25}) {
        const auto ch = derive_channel(0.05, rate, bits, tp);
        CHECK(ch.rtt == doctest::Approx(ch.t_s + 2 * tp));
        CHECK(static_cast<double>(ch.bdp) * ch.t_s >= ch.rtt * (1 - 1e-9));
        CHECK(static_cast<double>(ch.bdp - 1) * ch.t_s < ch.rtt);
      }
    }
  }
}

TEST_CASE("redundancy_from_margin examples") {
  CHECK(redundancy_from_margin(0.0, 0.0) == 1.0);
  CHECK(redundancy_from_margin(0.25, 0.2) == doctest::Approx(1.5625).epsilon(1e-14));
  CHECK(redundancy_from_margin(0.1, 0.1) == doctest::Approx(1.1 / 0.9).epsilon(1e-14));
  CHECK_THROWS_AS(redundancy_from_margin(-0.1, 0.1), InvalidArgument);
}

TEST_CASE("coded_count_distribution examples") {
  const auto integral = coded_count_distribution(2.0, 3);
  CHECK(integral.degenerate());
  CHECK(integral.low == 6);

  const auto half = coded_count_distribution(1.5, 3);
  CHECK(half.low == 4);
  CHECK(half.high == 5);
  CHECK(half.p_high == doctest::Approx(0.5));

  const auto skew = coded_count_distribution(1.33, 3);
  CHECK(skew.low == 3);
  CHECK(skew.high == 4);
  CHECK(skew.p_low() == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(skew.p_high == doctest::Approx(0.99).epsilon(1e-9));
}

TEST_CASE("coded count mixture has mean R i") {
  for (double r : {1.0, 1.05, 1.2222, 1.5, 2.7}) {
    for (int i = 1; i <= 40; ++i) {
      const auto m = coded_count_distribution(r, i);
      CHECK(m.mean() == doctest::Approx(r * i).epsilon(1e-12));
      CHECK(m.low >= i);
    }
  }
  CHECK_THROWS_AS(coded_count_distribution(0.9, 3), InvalidArgument);
}

TEST_CASE("make_coding computes b under both definitions") {
  const auto ch = derive_channel(0.1, 10e6, 10000, 0.0495);  // bdp 100
  const auto c = make_coding(ch, 16, 1.25);
  CHECK(c.n_low == 20);
  CHECK(c.n_high == 20);
  CHECK(c.b == 5);
  CHECK_FALSE(c.exceeds_bdp);

  const auto g = make_coding(ch, 16, 1.25, BDefinition::kGenerationSize);
  CHECK(g.b == 7);

  const auto big = make_coding(ch, 90, 1.2);
  CHECK(big.exceeds_bdp);
  CHECK(big.b == 1);

  CHECK_THROWS_AS(make_coding(ch, 0, 1.2), InvalidArgument);
  CHECK_THROWS_AS(make_coding(ch, 4, 0.99), InvalidArgument);
}

TEST_CASE("snapped_ceil ignores rounding noise") {
  CHECK(snapped_ceil(100.0000000001) == 100);
  CHECK(snapped_ceil(99.9999999999) == 100);
  CHECK(snapped_ceil(100.01) == 101);
  CHECK(snapped_ceil(0.1 / 0.001) == 100);
}

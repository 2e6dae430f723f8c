#include <cmath>

#include "codedelay/efficiency.hpp"
#include "codedelay/error.hpp"
#include "codedelay/simulator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace codedelay;

TEST_CASE("received count on a transition") {
  const TransitionKernel kernel(0.1, 2.0, 3);
  CHECK(received_on_transition(kernel, 3, 1) == 2.0);

  const TransitionKernel lossless(0.0, 1.25, 4);
  CHECK(received_on_transition(lossless, 4, 0) == 5.0);

  const TransitionKernel two(0.1, 2.0, 2);
  const auto recv = oracle::enumerated_received(4, 0.1);
  double num = 0.0, den = 0.0;
  for (int x = 2; x <= 4; ++x) {
    num += x * recv[x];
    den += recv[x];
  }
  CHECK(received_on_transition(two, 2, 0) == doctest::Approx(num / den).epsilon(1e-13));

  CHECK_THROWS_AS(received_on_transition(two, 3, 0), InvalidArgument);
}

TEST_CASE("efficiency examples") {
  for (double eps : {0.0, 0.1, 0.5, 0.9}) {
    const TransitionKernel one(eps, 1.0, 1);
    CHECK(expected_received(one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(efficiency(one).eta == doctest::Approx(1.0).epsilon(1e-12));
  }
  const TransitionKernel lossless(0.0, 1.25, 4);
  CHECK(expected_received(lossless) == 5.0);
  CHECK(efficiency(lossless).eta == 0.8);
}

TEST_CASE("efficiency stays in (0, 1] and falls with redundancy") {
  for (double eps : {0.0, 0.05, 0.2, 0.5}) {
    for (int k : {1, 2, 5, 16, 64, 256}) {
      double prev = 2.0;
      for (double r = 1.0; r <= 3.0 + 1e-9; r += 0.25) {
        const double eta = efficiency(TransitionKernel(eps, r, k)).eta;
        INFO("eps=" << eps << " k=" << k << " R=" << r);
        CHECK(eta > 0.0);
        CHECK(eta <= 1.0 + 1e-12);
        CHECK(eta <= prev + 1e-12);
        prev = eta;
      }
    }
  }
}

TEST_CASE("expected received grows with generation size") {
  for (double eps : {0.05, 0.3}) {
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double m = expected_received(TransitionKernel(eps, 1.3, i));
      CHECK(m >= prev);
      CHECK(m >= i);
      prev = m;
    }
  }
}

TEST_CASE("expected received against simulated generations") {
  const auto ch = derive_channel(0.1, 10e6, 10000, 0.0495);
  SimConfig config;
  config.channel = ch;
  config.coding = make_coding(ch, 2, 2.0);
  config.n_packets = 2 * 1000000;
  config.seed = 23;
  const auto sim = run_coded(config);
  const double m = expected_received(build_kernel(ch, config.coding));
  CHECK(std::abs(sim.received_mean - m) <= 0.005 * m);
  const double se = std::sqrt(sim.received_var / sim.generations);
  CHECK(std::abs(sim.received_mean - m) <= 3 * se);
}

#include <cmath>
#include <vector>

#include "codedelay/error.hpp"
#include "codedelay/kernel.hpp"
#include "codedelay/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace codedelay;

TEST_CASE("worked example rows") {
  const TransitionKernel kernel(0.1, 2.0, 2);
  CHECK(kernel(0, 0) == 1.0);
  CHECK(kernel(2, 0) == doctest::Approx(0.9963).epsilon(1e-12));
  CHECK(kernel(2, 1) == doctest::Approx(0.0036).epsilon(1e-12));
  CHECK(kernel(2, 2) == doctest::Approx(0.0001).epsilon(1e-12));
  CHECK(kernel(1, 0) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(kernel(1, 1) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(kernel(1, 2) == 0.0);

  CHECK(kernel.absorption_cdf(0) == 0.0);
  CHECK(kernel.absorption_cdf(1) == doctest::Approx(0.9963).epsilon(1e-12));
  const double cdf2 = 0.9963 + 0.0036 * 0.99 + 0.0001 * 0.9963;
  CHECK(kernel.absorption_cdf(2) == doctest::Approx(cdf2).epsilon(1e-12));
  CHECK(kernel.absorption_cdf(2) == doctest::Approx(0.999964).epsilon(1e-6));

  CHECK(kernel.p_y(0) == 0.0);
  CHECK(kernel.p_y(2) == doctest::Approx(cdf2 - 0.9963).epsilon(1e-10));
  CHECK(kernel.p_y(2) == doctest::Approx(0.003664).epsilon(1e-3));

  CHECK(kernel.p_z(1, 2) == doctest::Approx(kernel.p_y(2)).epsilon(1e-12));
  CHECK(kernel.p_z(2, 1) == doctest::Approx(0.9963 * 0.9963).epsilon(1e-12));
}

TEST_CASE("lossless channel absorbs in one round") {
  const TransitionKernel kernel(0.0, 1.0, 5);
  CHECK(kernel(5, 0) == 1.0);
  for (int j = 1; j <= 5; ++j) CHECK(kernel(5, j) == 0.0);
  CHECK(kernel.p_y(1) == 1.0);
  CHECK(kernel.p_z(3, 1) == 1.0);
  CHECK(kernel.survival(1) == 0.0);
}

TEST_CASE("rows match enumeration of all loss patterns") {
  for (double eps : {0.05, 0.1, 0.3}) {
    for (int k = 1; k <= 6; ++k) {
      for (double r : {1.0, 1.3, 1.5, 2.0, 2.5}) {
        if (std::ceil(r * k) > 16) continue;
        for (auto rule : {RoundingRule::kMixture, RoundingRule::kCeil, RoundingRule::kFloor}) {
          KernelOptions opt;
          opt.rounding = rule;
          const TransitionKernel kernel(eps, r, k, opt);
          for (int i = 0; i <= k; ++i) {
            if (i == 0) {
              CHECK(kernel(0, 0) == 1.0);
              continue;
            }
            const auto expect = oracle::enumerated_row(eps, r, i, rule);
            for (int j = 0; j <= i; ++j) {
              CHECK(std::abs(kernel(i, j) - expect[j]) <= 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("rows are stochastic and lower triangular") {
  for (double eps : {0.0, 0.01, 0.2, 0.5, 0.9}) {
    for (int k : {1, 7, 64, 300}) {
      const TransitionKernel kernel(eps, 1.3, k);
      for (int i = 0; i <= k; i += (k > 20 ? 17 : 1)) {
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) {
          const double p = kernel(i, j);
          CHECK(p >= 0.0);
          if (j > i) CHECK(p == 0.0);
          sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("absorption cdf is nondecreasing and reaches one") {
  for (double eps : {0.05, 0.3, 0.6}) {
    const TransitionKernel kernel(eps, 1.1, 20);
    double prev = 0.0;
    double total = 0.0;
    for (int r = 1; r <= kernel.horizon(); ++r) {
      const double c = kernel.absorption_cdf(r);
      CHECK(c >= prev);
      CHECK(kernel.survival(r) == doctest::Approx(1.0 - c).epsilon(1e-9).scale(1.0));
      prev = c;
      total += kernel.p_y(r);
    }
    CHECK(kernel.survival(kernel.horizon()) < 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("p_z sums to one and equals p_y for one process") {
  const TransitionKernel kernel(0.2, 1.2, 10);
  for (int n : {1, 2, 5, 40}) {
    double total = 0.0;
    for (int z = 1; z <= kernel.horizon(); ++z) {
      total += kernel.p_z(n, z);
      if (n == 1) CHECK(kernel.p_z(1, z) == doctest::Approx(kernel.p_y(z)).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("more redundancy absorbs sooner") {
  for (double eps : {0.05, 0.2}) {
    const TransitionKernel low(eps, 1.05, 16);
    const TransitionKernel high(eps, 1.4, 16);
    for (int r = 1; r <= 5; ++r) CHECK(high.absorption_cdf(r) >= low.absorption_cdf(r) - 1e-15);
  }
}

TEST_CASE("chain Monte-Carlo agrees with the cdf") {
  const double eps = 0.1;
  const TransitionKernel kernel(eps, 2.0, 2);
  auto rng = CounterRng::derive(3, 1);
  const int runs = 1000000;
  int done1 = 0, done2 = 0;
  for (int t = 0; t < runs; ++t) {
    int need = 2;
    for (int round = 1; round <= 2 && need > 0; ++round) {
      const int n = 2 * need;
      int got = 0;
      for (int m = 0; m < n; ++m) got += rng.bernoulli(1 - eps);
      need = std::max(0, need - got);
      if (need == 0) (round == 1 ? done1 : done2)++;
    }
  }
  const double c1 = done1 / double(runs), c2 = (done1 + done2) / double(runs);
  auto within = [&](double p, double est) {
    return std::abs(est - p) <= 4 * std::sqrt(p * (1 - p) / runs) + 1e-12;
  };
  CHECK(within(kernel.absorption_cdf(1), c1));
  CHECK(within(kernel.absorption_cdf(2), c2));
}

TEST_CASE("invalid kernels are rejected") {
  CHECK_THROWS_AS(TransitionKernel(1.0, 1.5, 4), InvalidArgument);
  CHECK_THROWS_AS(TransitionKernel(0.1, 0.5, 4), InvalidArgument);
  CHECK_THROWS_AS(TransitionKernel(0.1, 1.5, 0), InvalidArgument);
  KernelOptions tight;
  tight.max_rounds = 2;
  CHECK_THROWS_AS(TransitionKernel(0.9, 1.0, 50, tight), NumericalError);
}

#pragma once

#include <array>

#include "codedelay/kernel.hpp"

namespace codedelay {

/// Moments of S, the number of systematic packets received before the first loss.
struct PrefixMoments {
  std::array<double, 3> first_round{};    // E[S^i | Y = 1], i = 1..3
  std::array<double, 3> retransmitted{};  // E[S^i | Y != 1]; NaN when lossless
  bool lossless = false;                  // epsilon == 0: Y != 1 has probability zero

  double s1(int i) const { return first_round.at(i - 1); }
  double s2(int i) const { return retransmitted.at(i - 1); }
};

/// Moments of V_N, the position of the last of N concurrent generations to complete.
struct StragglerMoments {
  double v1 = 0.0;
  double v2 = 0.0;
};

double prefix_pmf(double epsilon, int k, bool first_round, int s);

/// Closed-form moments. Falls back to direct summation when epsilon or k*epsilon is so small
/// that the 1/epsilon^3 terms lose precision, and to the exact limit k^i at epsilon = 0.
PrefixMoments prefix_moments(double epsilon, int k);

/// Moment generating function of S given Y = 1.
double prefix_mgf(double epsilon, int k, double t);

double straggler_pmf(const TransitionKernel& kernel, int n, int z, int v);

StragglerMoments straggler_moments(const TransitionKernel& kernel, int n, int z);

}  // namespace codedelay

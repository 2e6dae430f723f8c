#pragma once

// Reference computations used by the tests. They follow the model definitions directly
// (enumeration, plain summation, explicit per-packet delays) and share no code with the
// closed forms under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "codedelay/kernel.hpp"
#include "codedelay/params.hpp"

namespace oracle {

// Probability of each received count after sending n packets, summed over all 2^n loss
// patterns.
inline std::vector<double> enumerated_received(int n, double epsilon) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double p = 1.0;
    int received = 0;
    for (int bit = 0; bit < n; ++bit) {
      if (mask & (1u << bit)) {
        p *= 1.0 - epsilon;
        ++received;
      } else {
        p *= epsilon;
      }
    }
    out[received] += p;
  }
  return out;
}

// Row i of the dof chain, entries j = 0..i.
inline std::vector<double> enumerated_row(double epsilon, double redundancy, int i,
                                          codedelay::RoundingRule rule) {
  std::vector<double> row(static_cast<std::size_t>(i) + 1, 0.0);
  const double x = redundancy * i;
  double lo = std::floor(x), hi = std::ceil(x);
  if (std::abs(x - std::round(x)) < 1e-9) lo = hi = std::round(x);
  std::vector<std::pair<int, double>> counts;
  if (rule == codedelay::RoundingRule::kCeil || lo == hi) {
    counts.push_back({static_cast<int>(hi), 1.0});
  } else if (rule == codedelay::RoundingRule::kFloor) {
    counts.push_back({static_cast<int>(lo), 1.0});
  } else {
    counts.push_back({static_cast<int>(lo), hi - x});
    counts.push_back({static_cast<int>(hi), x - lo});
  }
  for (auto [n, w] : counts) {
    const auto recv = enumerated_received(n, epsilon);
    for (int m = 0; m <= n; ++m) {
      if (m >= i) {
        row[0] += w * recv[m];
      } else {
        row[i - m] += w * recv[m];
      }
    }
  }
  return row;
}

// P(S = s | Y = 1) and P(S = s | Y != 1) straight from the loss-position definition.
inline std::vector<double> prefix_distribution(double epsilon, int k, bool first_round) {
  std::vector<double> p(static_cast<std::size_t>(k) + 1, 0.0);
  for (int s = 0; s < k; ++s) p[s] = epsilon * std::pow(1.0 - epsilon, s);
  if (first_round) {
    p[k] = std::pow(1.0 - epsilon, k);
  } else {
    const double some_lost = -std::expm1(k * std::log1p(-epsilon));
    for (int s = 0; s < k; ++s) p[s] /= some_lost;
  }
  return p;
}

inline double prefix_moment(double epsilon, int k, bool first_round, int power) {
  const auto p = prefix_distribution(epsilon, k, first_round);
  long double sum = 0.0L;
  for (int s = 0; s <= k; ++s) sum += std::pow(static_cast<long double>(s), power) * p[s];
  return static_cast<double>(sum);
}

// Distribution of the last finisher's position among n chains that all finish by round z.
inline std::vector<double> straggler_distribution(const codedelay::TransitionKernel& kernel, int n,
                                                  int z) {
  const double upper = kernel.absorption_cdf(z);
  const double lower = kernel.absorption_cdf(z - 1);
  const double exact = kernel.p_y(z);
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    p[v] = std::pow(upper, n - v - 1) * std::pow(lower, v) * exact;
    total += p[v];
  }
  for (double& x : p) x /= total;
  return p;
}

struct Moments2 {
  double mean = 0.0;
  double second = 0.0;
};

// E over S (and V) of the per-packet delay model for one (y, z) cell: the average over the
// generation's k packets of d and d^2. Straggler distribution is empty when z = 1.
inline Moments2 cell_by_packets(int y, int z, const codedelay::ChannelParams& ch,
                                const codedelay::CodingParams& coding,
                                const std::vector<double>& straggler) {
  const int k = coding.k;
  const double ts = ch.t_s, tp = ch.t_p, nk = coding.redundancy * k;
  const bool first = (y == 1);
  const auto ps = prefix_distribution(ch.epsilon, k, z == 1 ? first : false);
  std::vector<double> pv = straggler.empty() ? std::vector<double>{1.0} : straggler;
  Moments2 out;
  auto add = [&](double weight, double d) {
    out.mean += weight * d / k;
    out.second += weight * d * d / k;
  };
  for (int s = 0; s <= k; ++s) {
    if (ps[s] == 0.0) continue;
    for (std::size_t v = 0; v < pv.size(); ++v) {
      const double w = ps[s] * pv[v];
      const double vd = static_cast<double>(v);
      if (z == 1 && y == 1) {
        for (int i = 1; i <= s; ++i) add(w, ts + tp);
        for (int i = 0; i < k - s; ++i) add(w, tp + (k - s - i + 1) * ts);  // one coded packet
      } else if (z == 1) {
        for (int i = 1; i <= s; ++i) add(w, ts + tp);
        for (int i = 0; i < k - s; ++i) add(w, (2 * y - 1) * tp + (nk - s - i) * ts);
      } else if (z > y) {
        // S does not matter: every packet waits for the straggler.
        for (int i = 1; i <= k; ++i) add(w, (nk - k + i) * ts + (2 * z - 1) * tp - (vd + 1) * nk * ts);
      } else {
        for (int i = 1; i <= s; ++i) add(w, (nk - i + 1) * ts + (2 * z - 1) * tp - (vd + 1) * nk * ts);
        for (int j = s + 1; j <= k; ++j) add(w, (2 * y - 1) * tp + (nk - j + 1) * ts);
      }
    }
  }
  return out;
}

// Case 3 does not depend on S; cell_by_packets still sums over it, so normalise.
inline Moments2 cell_oracle(int y, int z, const codedelay::ChannelParams& ch,
                            const codedelay::CodingParams& coding,
                            const std::vector<double>& straggler) {
  Moments2 m = cell_by_packets(y, z, ch, coding, straggler);
  if (z > 1 && z > y) {
    const auto ps = prefix_distribution(ch.epsilon, coding.k, false);
    double total = 0.0;
    for (double p : ps) total += p;
    m.mean /= total;
    m.second /= total;
  }
  return m;
}

}  // namespace oracle
